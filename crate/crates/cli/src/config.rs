//! Run configuration. Flags and `--json-config` files both end up here; a run
//! is a pure function of its [`RunConfig`].

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use subord_core::{Exponent, FillPolicy, GridSpec, Polynomial, Registry};

pub const DEFAULT_L: f64 = 40.0;
pub const DEFAULT_N: usize = 16384;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L", default = "default_l")]
    pub half_length: f64,
    #[serde(rename = "N", default = "default_n")]
    pub size: usize,
}

fn default_l() -> f64 {
    DEFAULT_L
}

fn default_n() -> usize {
    DEFAULT_N
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_length: DEFAULT_L,
            size: DEFAULT_N,
        }
    }
}

fn default_eps() -> Vec<f64> {
    vec![1.0, 0.5, 0.1]
}

fn default_ps() -> Vec<Exponent> {
    vec![Exponent::ONE, Exponent::TWO, Exponent::INFINITY]
}

fn landau_q() -> Polynomial {
    Polynomial::x()
}

fn landau_p1() -> Polynomial {
    Polynomial::x().mul(&Polynomial::x())
}

fn landau_p2() -> Polynomial {
    Polynomial::constant(Complex64::new(1.0, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CommandConfig {
    WienerNorm {
        #[serde(default = "default_multiplier")]
        multiplier: Registry,
    },
    GwCompare {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "two")]
        beta: f64,
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
        #[serde(default = "default_ps")]
        p: Vec<Exponent>,
    },
    Lemma2 {
        #[serde(rename = "Q", default = "landau_q")]
        q_poly: Polynomial,
        #[serde(rename = "P1", default = "landau_p1")]
        p1_poly: Polynomial,
        #[serde(rename = "P2", default = "landau_p2")]
        p2_poly: Polynomial,
    },
    DiffopVerify {
        #[serde(rename = "Q", default = "landau_q")]
        q_poly: Polynomial,
        #[serde(rename = "P1", default = "landau_p1")]
        p1_poly: Polynomial,
        #[serde(rename = "P2", default = "landau_p2")]
        p2_poly: Polynomial,
        #[serde(default = "two_exp")]
        q: Exponent,
        /// Defaults to `q`.
        #[serde(default)]
        p1: Option<Exponent>,
        #[serde(default)]
        p2: Option<Exponent>,
    },
    Compare {
        m1: Registry,
        m2: Registry,
        #[serde(default = "default_ps")]
        p: Vec<Exponent>,
        #[serde(default)]
        zero_tolerance: Option<f64>,
        #[serde(default)]
        fill: Option<FillPolicy>,
    },
    Selftest,
}

fn default_multiplier() -> Registry {
    Registry::ExpAbs { rate: 1.0 }
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn two_exp() -> Exponent {
    Exponent::TWO
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::WienerNorm { .. } => "wiener-norm",
            CommandConfig::GwCompare { .. } => "gw-compare",
            CommandConfig::Lemma2 { .. } => "lemma2",
            CommandConfig::DiffopVerify { .. } => "diffop-verify",
            CommandConfig::Compare { .. } => "compare",
            CommandConfig::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    /// Report path; the CSV summary goes next to it. Not echoed in reports.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

impl RunConfig {
    /// Builds a config from flag values (as JSON), then applies `file` on top.
    /// The file may not switch to a different subcommand.
    pub fn from_layers(flags: Value, file: Option<Value>) -> Result<Self, ConfigError> {
        let name = flags
            .pointer("/command/name")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| ConfigError("missing command name".into()))?;
        let mut merged = flags;
        if let Some(file) = file {
            if !file.is_object() {
                return Err(ConfigError("config file must hold a JSON object".into()));
            }
            if let Some(other) = file.pointer("/command/name") {
                if other.as_str() != Some(name.as_str()) {
                    return Err(ConfigError(format!("config file names command {other}, but {name} was invoked")));
                }
            }
            merge(&mut merged, file);
        }
        let config: RunConfig = serde_json::from_value(merged).map_err(|e| ConfigError(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn parse_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.grid.half_length, self.grid.size).map_err(|e| ConfigError(e.to_string()))
    }

    /// Checks that do not need any numerics.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        let bad = |msg: String| Err(ConfigError(msg));
        match &self.command {
            CommandConfig::WienerNorm { multiplier } => {
                multiplier.validate().map_err(|e| ConfigError(e.to_string()))?;
            }
            CommandConfig::GwCompare { alpha, beta, eps, p } => {
                if !(alpha.is_finite() && beta.is_finite() && *alpha > 0.0 && alpha < beta) {
                    return bad(format!("need 0 < alpha < beta, got alpha={alpha}, beta={beta}"));
                }
                if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                    return bad(format!("eps must be a non-empty list of positive numbers, got {eps:?}"));
                }
                if p.is_empty() {
                    return bad("p must be a non-empty list".into());
                }
            }
            CommandConfig::Lemma2 { q_poly, p1_poly, p2_poly } | CommandConfig::DiffopVerify { q_poly, p1_poly, p2_poly, .. } => {
                for (name, poly) in [("Q", q_poly), ("P1", p1_poly), ("P2", p2_poly)] {
                    if poly.coeffs().iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                        return bad(format!("{name} has non-finite coefficients"));
                    }
                }
            }
            CommandConfig::Compare {
                m1,
                m2,
                p,
                zero_tolerance,
                ..
            } => {
                m1.validate().map_err(|e| ConfigError(e.to_string()))?;
                m2.validate().map_err(|e| ConfigError(e.to_string()))?;
                if p.is_empty() {
                    return bad("p must be a non-empty list".into());
                }
                if let Some(t) = zero_tolerance {
                    if !(*t > 0.0 && *t < 1.0) {
                        return bad(format!("zero_tolerance must lie in (0, 1), got {t}"));
                    }
                }
            }
            CommandConfig::Selftest => {}
        }
        Ok(())
    }

    /// The config as echoed in reports.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Object(Map::new()))
    }
}
