//! Mass-weighted backtracking line search.

use crate::config::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    pub gamma: f64,
    pub h0: f64,
    pub max_shrinks: usize,
    /// Multiplier `c` in the guard `F(x - hp) <= F(x) - c·λm̃·h·|∇F|²`.
    pub descent_factor: f64,
}

impl LineSearchParams {
    pub fn from_config(config: &SolverConfig) -> Self {
        Self {
            gamma: config.gamma,
            h0: config.h0,
            max_shrinks: config.max_shrinks,
            descent_factor: config.descent_factor(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    /// Accepted step `h0·γ^shrinks`, or the last rejected trial when not accepted.
    pub h: f64,
    pub shrinks: usize,
    /// Objective at `x - h·p`.
    pub f_new: f64,
    /// Objective evaluations spent on trial points.
    pub evals: usize,
    pub accepted: bool,
}

/// `x - h·p`, written into `out`.
pub fn trial_point(x: &[f64], p: &[f64], h: f64, out: &mut [f64]) {
    for ((o, xi), pi) in out.iter_mut().zip(x).zip(p) {
        *o = xi - h * pi;
    }
}

/// Finds the first `s` with `F(x - γˢh₀p) <= F(x) - c·λm̃·γˢh₀·|∇F(x)|²`.
///
/// `f_x` and `grad_sq` are `F(x)` and `|∇F(x)|²`, supplied by the caller so
/// only trial points are counted in `evals`. Trial values that are NaN fail
/// the guard. After `max_shrinks` contractions the search gives up with
/// `accepted = false`.
pub fn backtrack<F>(
    objective: F,
    x: &[f64],
    p: &[f64],
    f_x: f64,
    grad_sq: f64,
    lambda_m: f64,
    params: &LineSearchParams,
) -> LineSearchResult
where
    F: Fn(&[f64]) -> f64,
{
    let slope = params.descent_factor * lambda_m * grad_sq;
    let mut trial = vec![0.0; x.len()];
    let mut h = params.h0;
    let mut f_new = f64::NAN;
    for shrinks in 0..=params.max_shrinks {
        h = params.h0 * params.gamma.powi(shrinks as i32);
        trial_point(x, p, h, &mut trial);
        f_new = objective(&trial);
        if f_new <= f_x - slope * h {
            return LineSearchResult { h, shrinks, f_new, evals: shrinks + 1, accepted: true };
        }
    }
    LineSearchResult { h, shrinks: params.max_shrinks, f_new, evals: params.max_shrinks + 1, accepted: false }
}
