pub mod comparison;
pub mod diffops;
pub mod error;
pub mod fixtures;
pub mod fourier;
pub mod grid;
pub mod measures;
pub mod multiplier;
pub mod polynomial;
pub mod report;
pub mod summability;
pub mod testkit;
pub mod wiener;

pub use comparison::{comparison_constant, ratio_multiplier, verify_subordination, ComparisonSetup, FillPolicy};
pub use diffops::{
    apply_diffop, diffop_subordination, lemma2_construct, lemma2_hypotheses, verify_identity, young_exponents, DiffopExponents,
    DiffopReport, HypothesisCheck, Lemma2Decomposition,
};
pub use error::{Error, ErrorClass, Result};
pub use fourier::{convolve, forward_ft, inverse_ft, lp_norm, Convolution};
pub use grid::{Exponent, GridSpec, SampledFunction, Side};
pub use measures::{convolve_with_measure, measure_ft, total_variation, Atom, FiniteMeasure, ShiftMode};
pub use multiplier::{Multiplier, Registry};
pub use polynomial::{real_roots, Polynomial, RealRoot, RootSet};
pub use report::{CaseRecord, SubordinationReport};
pub use summability::{gw_constant, gw_error, gw_kernel, gw_mean, gw_psi, gw_verify, MeanResult};
pub use testkit::{default_suite, materialize, materialize_all, Purpose, TestFunction, TestFunctionSpec};
pub use wiener::{carlson_sufficient_bound, wiener_norm_estimate, WienerEstimate};
