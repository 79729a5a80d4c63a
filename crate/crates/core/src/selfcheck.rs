//! Quick invariant suite behind the `check` subcommand.

use crate::config::{Mode, SolverConfig};
use crate::direction::random_descent_direction;
use crate::linesearch::{backtrack, trial_point, LineSearchParams};
use crate::mass::{apply_transfer, eliminate_light, merge_close, transfer_fractions};
use crate::objectives::{finite_diff_gradient, make_benchmark, BenchmarkId, FD_STEP};
use crate::problem::{dot, norm, Problem};
use crate::rng::RandomSource;
use crate::solver::run;
use crate::swarm::{Agent, SwarmState};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_failures(name: &'static str, checked: usize, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = match failures.first() {
            None => format!("{checked} cases"),
            Some(first) => format!("{} of {checked} cases failed; first: {first}", failures.len()),
        };
        Self { name, passed, detail }
    }
}

fn box_point(problem: &Problem, rng: &mut RandomSource) -> Vec<f64> {
    let b = problem.init_box();
    b.lower().iter().zip(b.upper()).map(|(&lo, &hi)| rng.uniform(lo, hi)).collect()
}

/// Analytic gradients against central differences at random box points.
pub fn check_gradients(rng: &mut RandomSource, points: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for id in BenchmarkId::ALL {
        for dim in [2, 6] {
            let problem = make_benchmark(id, dim).expect("benchmark dimensions are valid");
            for _ in 0..points {
                let x = box_point(&problem, rng);
                let g = problem.gradient(&x);
                let fd = finite_diff_gradient(&problem, &x, FD_STEP);
                let tol = 1e-5f64.max(1e-5 * norm(&g));
                if let Some((k, (a, b))) = g.iter().zip(&fd).enumerate().find(|(_, (a, b))| (*a - *b).abs() > tol) {
                    failures.push(format!("{id} d={dim} coord {k}: {a} vs {b}"));
                }
                checked += 1;
            }
        }
    }
    CheckOutcome::from_failures("gradient-vs-finite-difference", checked, failures)
}

/// Random transfer/eliminate/merge sequences keep the total mass at one.
pub fn check_conservation(rng: &mut RandomSource, sequences: usize) -> CheckOutcome {
    let problem = make_benchmark(BenchmarkId::Rastrigin, 2).expect("valid benchmark");
    let mut failures = Vec::new();
    for s in 0..sequences {
        let n = 2 + (rng.uniform(0.0, 30.0) as usize);
        let agents = (0..n)
            .map(|_| Agent {
                // A coarse lattice makes merges likely.
                position: (0..2).map(|_| (rng.uniform(-3.0, 3.0) * 2.0).round() / 2.0).collect(),
                mass: 1.0 / n as f64,
                active: true,
            })
            .collect();
        let mut swarm = SwarmState::from_agents(&problem, agents).expect("nonempty swarm");
        let q = rng.uniform(1.0, 8.0);
        for _ in 0..10 {
            merge_close(&mut swarm, 1e-3);
            swarm.refresh_indices();
            let eta = transfer_fractions(&swarm.active_f_values(), q, 1e-12).expect("finite values");
            apply_transfer(&mut swarm, &eta).expect("aligned fractions");
            eliminate_light(&mut swarm, 1e-2, n);
            let total = swarm.total_mass();
            if (total - 1.0).abs() > 1e-12 {
                failures.push(format!("sequence {s}: total mass {total}"));
                break;
            }
            for i in swarm.active_indices() {
                swarm.f_values[i] -= rng.uniform(0.0, 1.0);
            }
        }
    }
    CheckOutcome::from_failures("mass-conservation", sequences, failures)
}

/// Cap samples are unit vectors at the drawn angle to the gradient.
pub fn check_directions(rng: &mut RandomSource, samples: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for d in [2, 3, 10, 20] {
        let grad: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let q_hat: Vec<f64> = grad.iter().map(|g| g / norm(&grad)).collect();
        for _ in 0..samples {
            let m = rng.uniform(1e-6, 1.0);
            let s = random_descent_direction(&grad, m, Mode::Sbrd, rng).expect("nonzero gradient");
            let unit_err = (norm(&s.omega) - 1.0).abs();
            let align_err = (dot(&s.omega, &q_hat) - s.r).abs();
            if unit_err > 1e-12 || align_err > 1e-10 || s.r < 0.5 * (1.0 + m) {
                failures.push(format!("d={d} m={m}: |ω|-1={unit_err:e}, <ω,q>-r={align_err:e}"));
            }
            checked += 1;
        }
    }
    CheckOutcome::from_failures("direction-invariants", checked, failures)
}

/// Accepted steps satisfy the descent guard and are maximal on the γ-grid.
pub fn check_backtracking(rng: &mut RandomSource, instances: usize) -> CheckOutcome {
    let params = LineSearchParams { gamma: 0.9, h0: 1.0, max_shrinks: 100, descent_factor: 0.5 };
    let mut failures = Vec::new();
    for t in 0..instances {
        let k = 10f64.powf(rng.uniform(-1.0, 3.0));
        let f = move |x: &[f64]| 0.5 * k * dot(x, x) + (3.0 * x[0]).sin();
        let x = vec![rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)];
        let g = vec![k * x[0] + 3.0 * (3.0 * x[0]).cos(), k * x[1]];
        let gsq = dot(&g, &g);
        let lm = 0.2 * rng.uniform(1e-3, 1.0);
        let res = backtrack(f, &x, &g, f(&x), gsq, lm, &params);
        if !res.accepted {
            continue;
        }
        let mut y = vec![0.0; 2];
        trial_point(&x, &g, res.h, &mut y);
        if f(&y) > f(&x) - 0.5 * lm * res.h * gsq {
            failures.push(format!("instance {t}: descent guard violated at h={}", res.h));
        }
        if res.shrinks >= 1 {
            let prev = res.h / params.gamma;
            trial_point(&x, &g, prev, &mut y);
            if f(&y) <= f(&x) - 0.5 * lm * prev * gsq {
                failures.push(format!("instance {t}: h/γ={prev} also admissible"));
            }
        }
    }
    CheckOutcome::from_failures("backtracking-postconditions", instances, failures)
}

/// The best objective value never increases along a trace.
pub fn check_monotone_traces(seed: u64, runs: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    for id in BenchmarkId::ALL {
        let problem = make_benchmark(id, 3).expect("valid benchmark");
        let config = SolverConfig::default().with_agents(10);
        for r in 0..runs {
            match run(&problem, &config, seed.wrapping_add(r as u64)) {
                Ok(res) => {
                    if res.trace.windows(2).any(|w| w[1].f_min > w[0].f_min) {
                        failures.push(format!("{id} run {r}: f_min increased"));
                    }
                }
                Err(e) => failures.push(format!("{id} run {r}: {e}")),
            }
        }
    }
    CheckOutcome::from_failures("monotone-minimum", runs * BenchmarkId::ALL.len(), failures)
}

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = RandomSource::from_seed(seed);
    vec![
        check_gradients(&mut rng, 250),
        check_conservation(&mut rng, 1000),
        check_directions(&mut rng, 10_000),
        check_backtracking(&mut rng, 1000),
        check_monotone_traces(seed, 10),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for outcome in super::run_all(1) {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
