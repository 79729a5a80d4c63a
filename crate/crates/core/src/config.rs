use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direction rule used by every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Random directions drawn from a mass-dependent cap around the gradient.
    Sbrd,
    /// Plain gradient directions.
    Sbgd,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sbrd => "sbrd",
            Mode::Sbgd => "sbgd",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sbrd" => Ok(Mode::Sbrd),
            "sbgd" => Ok(Mode::Sbgd),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

/// Scalar knobs of the swarm solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_agents: usize,
    /// Mass transfer exponent `q >= 1`; larger values shed mass more slowly.
    pub q_exponent: f64,
    /// Descent parameter in `(0, 1)`.
    pub lambda: f64,
    /// Backtracking shrinkage factor in `(0, 1)`.
    pub gamma: f64,
    /// Initial trial step of every line search.
    pub h0: f64,
    /// Elimination tolerance; agents lighter than `tolm / N0` are removed.
    pub tolm: f64,
    /// Agents closer than this distance are merged.
    pub tolmerge: f64,
    /// Stop once the minimizer moves less than this in one iteration.
    pub tolres: f64,
    pub nmax: usize,
    /// Guard added to the `Fmax - Fmin` denominator of the transfer fractions.
    pub epsilon: f64,
    /// Agents whose gradient norm does not exceed this stay put.
    pub grad_floor: f64,
    pub max_shrinks: usize,
    pub mode: Mode,
    /// When set the sufficient-descent guard uses `λm̃/2`; otherwise `λm̃`.
    pub half_descent: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_agents: 25,
            q_exponent: 2.0,
            lambda: 0.2,
            gamma: 0.9,
            h0: 1.0,
            tolm: 1e-4,
            tolmerge: 1e-3,
            tolres: 1e-4,
            nmax: 200,
            epsilon: 1e-12,
            grad_floor: 1e-12,
            max_shrinks: 100,
            mode: Mode::Sbrd,
            half_descent: true,
        }
    }
}

impl SolverConfig {
    pub fn with_agents(mut self, n: usize) -> Self {
        self.n_agents = n;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q_exponent = q;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Multiplier of `λm̃h|∇F|²` in the descent guard.
    pub fn descent_factor(&self) -> f64 {
        if self.half_descent {
            0.5
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(msg: String) -> Result<()> {
            Err(Error::InvalidConfig(msg))
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.n_agents < 1 {
            return bad("agents must be at least 1".into());
        }
        if !(self.q_exponent >= 1.0 && self.q_exponent.is_finite()) {
            return bad(format!("q must be a finite real >= 1, got {}", self.q_exponent));
        }
        if !open_unit(self.lambda) {
            return bad(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        if !open_unit(self.gamma) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        for (name, v) in [
            ("h0", self.h0),
            ("tolm", self.tolm),
            ("tolmerge", self.tolmerge),
            ("tolres", self.tolres),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a positive finite real, got {v}"));
            }
        }
        if !(self.grad_floor >= 0.0 && self.grad_floor.is_finite()) {
            return bad(format!("grad_floor must be nonnegative, got {}", self.grad_floor));
        }
        if self.max_shrinks < 1 {
            return bad("max_shrinks must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!((c.lambda, c.gamma, c.h0, c.nmax), (0.2, 0.9, 1.0, 200));
        assert_eq!((c.tolm, c.tolmerge, c.tolres), (1e-4, 1e-3, 1e-4));
    }

    #[test]
    fn rejects_out_of_range_knobs() {
        let base = SolverConfig::default();
        for c in [
            SolverConfig { gamma: 1.5, ..base.clone() },
            SolverConfig { gamma: 0.0, ..base.clone() },
            SolverConfig { lambda: 1.0, ..base.clone() },
            SolverConfig { q_exponent: 0.5, ..base.clone() },
            SolverConfig { n_agents: 0, ..base.clone() },
            SolverConfig { h0: -1.0, ..base.clone() },
            SolverConfig { tolres: f64::NAN, ..base.clone() },
            SolverConfig { max_shrinks: 0, ..base.clone() },
        ] {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{c:?}");
        }
    }

    #[test]
    fn mode_parses_case_insensitively() {
        assert_eq!("SBRD".parse::<Mode>().unwrap(), Mode::Sbrd);
        assert_eq!("sbgd".parse::<Mode>().unwrap(), Mode::Sbgd);
        assert!("pso".parse::<Mode>().is_err());
    }
}
