use thiserror::Error;

/// Errors raised by the numerical drivers.
///
/// Variants map onto the failure classes the CLI turns into exit codes:
/// hypothesis violations, numerical non-convergence and invalid parameters.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("expected a {expected}-side function, got {actual}")]
    WrongSide {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("atom at {location} is {offset} away from the nearest grid node (exact shift requested)")]
    AtomOffGrid { location: f64, offset: f64 },

    #[error("one-sided limits at infinity disagree: left {left}, right {right}")]
    InconsistentLimit { left: String, right: String },

    #[error("estimate did not converge under refinement: {0}")]
    NonConvergent(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("nested zero sets violated at y = {y}: |m1| = {m1_abs:e} while m2 vanishes")]
    NestedZerosViolated { y: f64, m1_abs: f64 },

    #[error("zero set of the denominator touches the grid boundary; limit fill undefined")]
    FillUndefined,

    #[error("every case was skipped")]
    AllCasesSkipped,

    #[error("kernel unresolvable: epsilon {epsilon} below the minimum {minimum} for this grid")]
    KernelUnresolvable { epsilon: f64, minimum: f64 },

    #[error("grid too small for {id}: boundary value {boundary:e} exceeds 1e-10 of peak")]
    GridTooSmall { id: String, boundary: f64 },

    #[error("bandwidth exceeded: edge/peak ratio {ratio:e}")]
    BandwidthExceeded { ratio: f64 },

    #[error("root verification failed at {root}: residual {residual:e}")]
    RootVerification { root: String, residual: f64 },

    #[error("decomposition hypotheses violated: {}", .0.join("; "))]
    HypothesesViolated(Vec<String>),

    #[error("multiplicity obstruction near x = {center}: sup|h2| grew by {growth:.3} under refinement")]
    MultiplicityObstruction { center: f64, growth: f64 },

    #[error("neighbourhoods degenerate: roots {a} and {b} closer than 1e-8")]
    NeighborhoodDegenerate { a: f64, b: f64 },

    #[error("inadmissible exponents: {0}")]
    InadmissibleExponents(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The inputs do not satisfy the hypotheses of the method.
    Hypothesis,
    /// An estimate or a construction certificate failed.
    Numerical,
    /// Malformed parameters.
    Invalid,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NestedZerosViolated { .. }
            | Error::FillUndefined
            | Error::HypothesesViolated(_)
            | Error::InadmissibleExponents(_) => ErrorClass::Hypothesis,
            Error::InconsistentLimit { .. }
            | Error::NonConvergent(_)
            | Error::NotApplicable(_)
            | Error::AllCasesSkipped
            | Error::BandwidthExceeded { .. }
            | Error::RootVerification { .. }
            | Error::MultiplicityObstruction { .. }
            | Error::NeighborhoodDegenerate { .. } => ErrorClass::Numerical,
            Error::InvalidParameter(_)
            | Error::GridMismatch(_)
            | Error::WrongSide { .. }
            | Error::NonFinite { .. }
            | Error::AtomOffGrid { .. }
            | Error::KernelUnresolvable { .. }
            | Error::GridTooSmall { .. } => ErrorClass::Invalid,
        }
    }

    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::WrongSide { .. } => "wrong_side",
            Error::NonFinite { .. } => "non_finite",
            Error::AtomOffGrid { .. } => "atom_off_grid",
            Error::InconsistentLimit { .. } => "inconsistent_limit",
            Error::NonConvergent(_) => "non_convergent",
            Error::NotApplicable(_) => "not_applicable",
            Error::NestedZerosViolated { .. } => "nested_zeros_violated",
            Error::FillUndefined => "fill_undefined",
            Error::AllCasesSkipped => "all_cases_skipped",
            Error::KernelUnresolvable { .. } => "kernel_unresolvable",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::BandwidthExceeded { .. } => "bandwidth_exceeded",
            Error::RootVerification { .. } => "root_verification",
            Error::HypothesesViolated(_) => "hypotheses_violated",
            Error::MultiplicityObstruction { .. } => "multiplicity_obstruction",
            Error::NeighborhoodDegenerate { .. } => "neighborhood_degenerate",
            Error::InadmissibleExponents(_) => "inadmissible_exponents",
        }
    }
}
