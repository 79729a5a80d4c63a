//! Benchmark objectives with analytic gradients.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Objective, Problem, SearchBox};

/// Coordinate of the Styblinski-Tang minimizer, repeated in every dimension.
pub const STYBLINSKI_TANG_ARGMIN: f64 = -2.903534;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkId {
    Ackley,
    Rastrigin,
    Rosenbrock,
    #[serde(rename = "styblinski")]
    StyblinskiTang,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 4] =
        [BenchmarkId::Ackley, BenchmarkId::Rastrigin, BenchmarkId::Rosenbrock, BenchmarkId::StyblinskiTang];

    /// Stable lowercase identifier used on the command line and in output files.
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::Ackley => "ackley",
            BenchmarkId::Rastrigin => "rastrigin",
            BenchmarkId::Rosenbrock => "rosenbrock",
            BenchmarkId::StyblinskiTang => "styblinski",
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            BenchmarkId::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// Default initialization interval, applied to every coordinate.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            BenchmarkId::Ackley | BenchmarkId::StyblinskiTang => (-3.0, 3.0),
            BenchmarkId::Rastrigin => (-5.12, 5.12),
            BenchmarkId::Rosenbrock => (-2.048, 2.048),
        }
    }

    pub fn known_minimizer(self, dim: usize) -> Vec<f64> {
        match self {
            BenchmarkId::Ackley | BenchmarkId::Rastrigin => vec![0.0; dim],
            BenchmarkId::Rosenbrock => vec![1.0; dim],
            BenchmarkId::StyblinskiTang => vec![STYBLINSKI_TANG_ARGMIN; dim],
        }
    }

    fn objective(self) -> Arc<dyn Objective> {
        match self {
            BenchmarkId::Ackley => Arc::new(Ackley),
            BenchmarkId::Rastrigin => Arc::new(Rastrigin),
            BenchmarkId::Rosenbrock => Arc::new(Rosenbrock),
            BenchmarkId::StyblinskiTang => Arc::new(StyblinskiTang),
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ackley" => Ok(BenchmarkId::Ackley),
            "rastrigin" => Ok(BenchmarkId::Rastrigin),
            "rosenbrock" => Ok(BenchmarkId::Rosenbrock),
            "styblinski" | "styblinski-tang" | "styblinskitang" => Ok(BenchmarkId::StyblinskiTang),
            other => Err(Error::UnknownBenchmark(other.to_string())),
        }
    }
}

/// Builds the benchmark problem on its default box.
pub fn make_benchmark(id: BenchmarkId, dim: usize) -> Result<Problem> {
    let (lo, hi) = id.default_bounds();
    make_benchmark_in(id, dim, lo, hi)
}

/// Builds the benchmark problem with the initialization box `[lo, hi]ᵈ`.
pub fn make_benchmark_in(id: BenchmarkId, dim: usize, lo: f64, hi: f64) -> Result<Problem> {
    if dim < id.min_dim() {
        return Err(Error::Dimension { min: id.min_dim(), got: dim });
    }
    Problem::new(id.objective(), SearchBox::cube(dim, lo, hi)?)?.with_known_minimizer(id.known_minimizer(dim))
}

/// Central-difference gradient, `(F(x + h e_k) - F(x - h e_k)) / 2h` per coordinate.
pub fn finite_diff_gradient(problem: &Problem, x: &[f64], step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + step;
            let up = problem.value(&probe);
            probe[k] = x[k] - step;
            let down = problem.value(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// `-20 exp(-0.2 sqrt(|x|²/d)) - exp(Σ cos(2πxᵢ)/d) + 20 + e`
#[derive(Debug, Clone, Copy)]
pub struct Ackley;

impl Objective for Ackley {
    fn value(&self, x: &[f64]) -> f64 {
        let d = x.len() as f64;
        let sum_sq: f64 = x.iter().map(|v| v * v).sum();
        let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
        // Grouped so that the origin evaluates to exactly zero.
        20.0 * (1.0 - (-0.2 * (sum_sq / d).sqrt()).exp()) + (E - (sum_cos / d).exp())
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len() as f64;
        let sum_sq: f64 = x.iter().map(|v| v * v).sum();
        if sum_sq == 0.0 {
            // The radial term is not differentiable at the origin, which is the minimizer.
            return vec![0.0; x.len()];
        }
        let rms = (sum_sq / d).sqrt();
        let radial = 4.0 * (-0.2 * rms).exp() / (d * rms);
        let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
        let wave = 2.0 * PI * (sum_cos / d).exp() / d;
        x.iter().map(|&v| radial * v + wave * (2.0 * PI * v).sin()).collect()
    }
}

/// `10d + Σ (xᵢ² - 10 cos(2πxᵢ))`
#[derive(Debug, Clone, Copy)]
pub struct Rastrigin;

impl Objective for Rastrigin {
    fn value(&self, x: &[f64]) -> f64 {
        10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin()).collect()
    }
}

/// `Σ_{i<d} 100(x_{i+1} - xᵢ²)² + (1 - xᵢ)²`
#[derive(Debug, Clone, Copy)]
pub struct Rosenbrock;

impl Objective for Rosenbrock {
    fn value(&self, x: &[f64]) -> f64 {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len().saturating_sub(1) {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g
    }
}

/// `½ Σ (xᵢ⁴ - 16xᵢ² + 5xᵢ)`
#[derive(Debug, Clone, Copy)]
pub struct StyblinskiTang;

impl Objective for StyblinskiTang {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|&v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| 2.0 * v.powi(3) - 16.0 * v + 2.5).collect()
    }
}
