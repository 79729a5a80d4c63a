use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A differentiable objective on `ℝᵈ`.
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Objective assembled from a value closure and a gradient closure.
pub struct FnObjective<F, G> {
    value: F,
    gradient: G,
}

impl<F, G> FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(value: F, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

/// Axis-aligned box used to draw initial agent positions.
///
/// Agents are free to leave it once the iteration starts.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch { expected: lower.len(), got: upper.len() });
        }
        if lower.is_empty() {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        for (coord, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            // Written so that NaN bounds are rejected as well.
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateBox { coord, lower: lo, upper: hi });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The hypercube `[lo, hi]ᵈ`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, lo), hi)| lo <= v && v <= hi)
    }
}

/// Objective together with its initialization box and, for benchmarks,
/// the known global minimizer.
#[derive(Clone)]
pub struct Problem {
    dim: usize,
    objective: Arc<dyn Objective>,
    init_box: SearchBox,
    known_minimizer: Option<Vec<f64>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("dim", &self.dim)
            .field("init_box", &self.init_box)
            .field("known_minimizer", &self.known_minimizer)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(objective: Arc<dyn Objective>, init_box: SearchBox) -> Result<Self> {
        let dim = init_box.dim();
        if dim < 1 {
            return Err(Error::Dimension { min: 1, got: dim });
        }
        Ok(Self { dim, objective, init_box, known_minimizer: None })
    }

    pub fn from_fns<F, G>(value: F, gradient: G, init_box: SearchBox) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(Arc::new(FnObjective::new(value, gradient)), init_box)
    }

    pub fn with_known_minimizer(mut self, x_star: Vec<f64>) -> Result<Self> {
        if x_star.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: x_star.len() });
        }
        self.known_minimizer = Some(x_star);
        Ok(self)
    }

    /// Replaces the initialization box, keeping the objective.
    pub fn with_init_box(mut self, init_box: SearchBox) -> Result<Self> {
        if init_box.dim() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: init_box.dim() });
        }
        self.init_box = init_box;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn init_box(&self) -> &SearchBox {
        &self.init_box
    }

    pub fn known_minimizer(&self) -> Option<&[f64]> {
        self.known_minimizer.as_deref()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.objective.gradient(x)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
