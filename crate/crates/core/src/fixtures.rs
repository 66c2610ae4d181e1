//! Pinned values of `c(α,β)` from a high-resolution run. The fixture file is
//! embedded at build time; [`seed_gw_constants`] recomputes it.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::summability::gw_constant;

pub const GW_PAIRS: [(f64, f64); 4] = [(1.0, 2.0), (1.0, 3.0), (2.0, 4.0), (0.5, 1.0)];
pub const ORACLE_HALF_LENGTH: f64 = 160.0;
pub const ORACLE_SIZE: usize = 1 << 18;
pub const FIXTURE_TOLERANCE: f64 = 1e-3;

const EMBEDDED: &str = include_str!("../fixtures/gw_constants.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwFixture {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwFixtureFile {
    pub grid_half_length: f64,
    pub grid_size: usize,
    pub tolerance: f64,
    pub constants: Vec<GwFixture>,
}

impl GwFixtureFile {
    pub fn get(&self, alpha: f64, beta: f64) -> Option<f64> {
        self.constants
            .iter()
            .find(|c| c.alpha == alpha && c.beta == beta)
            .map(|c| c.value)
    }
}

/// Where [`seed_gw_constants`] writes; rebuild to pick up new values.
pub fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/gw_constants.json")
}

pub fn pinned_gw_constants() -> GwFixtureFile {
    serde_json::from_str(EMBEDDED).expect("embedded fixture file is valid JSON")
}

/// Runs the oracle grid for every pair in [`GW_PAIRS`].
pub fn compute_gw_constants() -> Result<GwFixtureFile> {
    let grid = GridSpec::new(ORACLE_HALF_LENGTH, ORACLE_SIZE)?;
    let constants = GW_PAIRS
        .par_iter()
        .map(|&(alpha, beta)| {
            let est = gw_constant(alpha, beta, &grid)?.require_converged()?;
            Ok(GwFixture {
                alpha,
                beta,
                value: est.total,
            })
        })
        .collect::<Result<_>>()?;
    Ok(GwFixtureFile {
        grid_half_length: ORACLE_HALF_LENGTH,
        grid_size: ORACLE_SIZE,
        tolerance: FIXTURE_TOLERANCE,
        constants,
    })
}

pub fn seed_gw_constants(path: &Path) -> Result<GwFixtureFile> {
    let file = compute_gw_constants()?;
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_covers_all_pairs() {
        let f = pinned_gw_constants();
        assert_eq!(f.grid_size, ORACLE_SIZE);
        for (a, b) in GW_PAIRS {
            assert!(f.get(a, b).is_some_and(|v| v.is_finite() && v >= 1.0));
        }
        assert_eq!(f.get(3.0, 1.0), None);
    }
}
