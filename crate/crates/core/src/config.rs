use serde::{Deserialize, Serialize};

use crate::decomp::Strategy;
use crate::{Error, Result};

/// What to do when the rounded color set fails to connect a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Report [`Error::InvariantViolation`]; the rounding guarantees this never happens.
    #[default]
    Strict,
    /// Greedily add colors until every pair is connected and flag the solution.
    Repair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Pre-rounding threshold; the decomposition diameter is `1/2 - epsilon`.
    pub epsilon: f64,
    /// Violation tolerance of the cutting-plane loop.
    pub tolerance: f64,
    pub strategy: Strategy,
    pub mode: Mode,
    pub seed: u64,
    /// Cut budget of the cutting-plane loop; `None` means `10·m·pairs + 1000`.
    pub max_cuts: Option<usize>,
    /// Largest color count accepted by the exact solvers.
    pub exact_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            tolerance: 1e-7,
            strategy: Strategy::BallCarving,
            mode: Mode::Strict,
            seed: 0,
            max_cuts: None,
            exact_limit: 15,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must lie in (0, 1e-3], got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        0.5 - self.epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_algorithm_constants() {
        let c = Config::default();
        c.validate().unwrap();
        assert!((c.delta() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn epsilon_out_of_range_is_rejected() {
        for eps in [0.0, 0.5, 1.0, -0.1, f64::NAN] {
            let c = Config { epsilon: eps, ..Config::default() };
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{eps}");
        }
    }

    #[test]
    fn tolerance_out_of_range_is_rejected() {
        for tol in [0.0, 1e-2] {
            let c = Config { tolerance: tol, ..Config::default() };
            assert!(c.validate().is_err());
        }
        let c = Config { tolerance: 1e-3, ..Config::default() };
        assert!(c.validate().is_ok());
    }
}
