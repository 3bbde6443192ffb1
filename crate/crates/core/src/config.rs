use serde::{Deserialize, Serialize};

/// Tolerances and budgets shared by every module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Tolerance for algebraic identities between laws.
    pub tol_exact: f64,
    /// Tolerance for sums over enumerated tables.
    pub tol_sum: f64,
    /// Maximum number of table entries (or weighted paths) an enumeration may touch.
    pub enum_budget: usize,
    pub min_row_count: usize,
    pub cluster_tol: f64,
    pub alpha: f64,
    pub mc_samples: usize,
    /// Minimum probability with which stopping times must be realized inside the horizon.
    pub horizon_floor: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_exact: 1e-12,
            tol_sum: 1e-9,
            enum_budget: 20_000_000,
            min_row_count: 100,
            cluster_tol: 0.1,
            alpha: 0.01,
            mc_samples: 100_000,
            horizon_floor: 0.99,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
