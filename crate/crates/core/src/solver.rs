//! Iteration driver: merge, mass update, then one descent move per agent.

use serde::{Deserialize, Serialize};

use crate::config::{Mode, SolverConfig};
use crate::direction::random_descent_direction;
use crate::error::{Error, Result};
use crate::linesearch::{backtrack, LineSearchParams};
use crate::mass::{apply_transfer, eliminate_light, merge_close, relative_masses, transfer_fractions};
use crate::problem::{dot, Problem};
use crate::rng::RandomSource;
use crate::swarm::{init_swarm, SwarmState};

/// Diagnostics of the swarm after `n` iterations.
///
/// Record `0` describes the initial swarm. For `n >= 1`, `heaviest_mass`
/// and `heaviest_prev_pos` refer to the agent that was heaviest right after
/// the mass update of iteration `n`, and `heaviest_prev_pos` is where it
/// stood before that iteration's move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub n_active: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub minimizer_pos: Vec<f64>,
    pub heaviest_mass: f64,
    pub heaviest_prev_pos: Vec<f64>,
    pub total_evals: u64,
    pub total_grad_evals: u64,
    /// Mean accepted step size over the agents that moved.
    pub mean_step: f64,
}

impl IterationRecord {
    fn snapshot(swarm: &SwarmState, heaviest: usize, heaviest_prev_pos: Vec<f64>, mean_step: f64) -> Self {
        Self {
            n: swarm.iteration,
            n_active: swarm.n_active(),
            f_min: swarm.f_min(),
            f_max: swarm.f_max(),
            minimizer_pos: swarm.minimizer().position.clone(),
            heaviest_mass: swarm.agents[heaviest].mass,
            heaviest_prev_pos,
            total_evals: swarm.evals,
            total_grad_evals: swarm.grad_evals,
            mean_step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveStatus {
    Moved,
    /// Gradient norm at or below the floor.
    Stationary,
    /// Line search exhausted its shrink budget.
    Rejected,
}

/// One agent's update within a step.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveRecord {
    pub agent: usize,
    pub status: MoveStatus,
    pub m_rel: f64,
    pub f_before: f64,
    pub f_after: f64,
    pub grad_sq: f64,
    /// Cosine between the direction and the gradient.
    pub r: f64,
    pub h: f64,
    pub shrinks: usize,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub record: IterationRecord,
    pub moves: Vec<MoveRecord>,
    /// Agent that was the minimizer when the mass update happened.
    pub tracked_minimizer: usize,
    pub minimizer_displacement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Residual,
    MaxIter,
    SingleStationaryAgent,
}

/// Resolved choices that affect reproducibility, reported with every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub mode: Mode,
    pub descent_factor: f64,
    pub elimination_threshold: String,
    pub merge_before_transfer: bool,
    /// True when the problem is one-dimensional and every direction is the gradient.
    pub gradient_fallback_1d: bool,
}

impl RunMetadata {
    pub fn new(problem: &Problem, config: &SolverConfig) -> Self {
        Self {
            mode: config.mode,
            descent_factor: config.descent_factor(),
            elimination_threshold: "tolm/initial_agents".to_string(),
            merge_before_transfer: true,
            gradient_fallback_1d: problem.dim() == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    pub iterations_used: usize,
    pub termination: Termination,
    pub trace: Vec<IterationRecord>,
    pub seed: u64,
    pub metadata: RunMetadata,
}

/// Record describing a freshly initialized swarm.
pub fn initial_record(swarm: &SwarmState) -> IterationRecord {
    let heaviest = swarm.heaviest_index;
    IterationRecord::snapshot(swarm, heaviest, swarm.agents[heaviest].position.clone(), 0.0)
}

/// Advances the swarm by one iteration.
pub fn step(
    swarm: &mut SwarmState,
    problem: &Problem,
    config: &SolverConfig,
    rng: &mut RandomSource,
) -> Result<StepOutcome> {
    merge_close(swarm, config.tolmerge);
    swarm.refresh_indices();

    let fractions = transfer_fractions(&swarm.active_f_values(), config.q_exponent, config.epsilon)
        .map_err(|e| match e {
            Error::NonFinite { agent, value } => Error::NonFinite { agent: swarm.active_indices()[agent], value },
            other => other,
        })?;
    apply_transfer(swarm, &fractions)?;
    eliminate_light(swarm, config.tolm, swarm.n_initial);
    swarm.refresh_indices();

    let tracked_minimizer = swarm.minimizer_index;
    let heaviest = swarm.heaviest_index;
    let heaviest_prev_pos = swarm.agents[heaviest].position.clone();
    let ls_params = LineSearchParams::from_config(config);

    let active = swarm.active_indices();
    let m_rel = relative_masses(swarm);
    let mut moves = Vec::with_capacity(active.len());
    for (&i, &m) in active.iter().zip(&m_rel) {
        let grad = problem.gradient(&swarm.agents[i].position);
        swarm.grad_evals += 1;
        let grad_sq = dot(&grad, &grad);
        if !grad_sq.is_finite() {
            return Err(Error::NonFinite { agent: i, value: grad_sq });
        }
        let f_before = swarm.f_values[i];
        let mut mv = MoveRecord {
            agent: i,
            status: MoveStatus::Stationary,
            m_rel: m,
            f_before,
            f_after: f_before,
            grad_sq,
            r: 1.0,
            h: 0.0,
            shrinks: 0,
            displacement: 0.0,
        };
        if grad_sq.sqrt() <= config.grad_floor {
            moves.push(mv);
            continue;
        }
        let dir = random_descent_direction(&grad, m, config.mode, rng)?;
        let x = &swarm.agents[i].position;
        let ls = backtrack(|y| problem.value(y), x, &dir.p, f_before, grad_sq, config.lambda * m, &ls_params);
        swarm.evals += ls.evals as u64;
        mv.r = dir.r;
        mv.h = ls.h;
        mv.shrinks = ls.shrinks;
        if ls.accepted {
            let agent = &mut swarm.agents[i];
            for (xk, pk) in agent.position.iter_mut().zip(&dir.p) {
                *xk -= ls.h * pk;
            }
            swarm.f_values[i] = ls.f_new;
            mv.status = MoveStatus::Moved;
            mv.f_after = ls.f_new;
            mv.displacement = ls.h * dot(&dir.p, &dir.p).sqrt();
        } else {
            mv.status = MoveStatus::Rejected;
        }
        moves.push(mv);
    }

    swarm.iteration += 1;
    swarm.refresh_indices();

    let steps: Vec<f64> = moves.iter().filter(|m| m.status == MoveStatus::Moved).map(|m| m.h).collect();
    let mean_step = if steps.is_empty() { 0.0 } else { steps.iter().sum::<f64>() / steps.len() as f64 };
    let minimizer_displacement =
        moves.iter().find(|m| m.agent == tracked_minimizer).map_or(0.0, |m| m.displacement);
    let record = IterationRecord::snapshot(swarm, heaviest, heaviest_prev_pos, mean_step);
    Ok(StepOutcome { record, moves, tracked_minimizer, minimizer_displacement })
}

/// Runs the solver from a seeded random initialization until the minimizer
/// stalls, the iteration budget runs out, or a lone agent becomes stationary.
pub fn run(problem: &Problem, config: &SolverConfig, seed: u64) -> Result<RunResult> {
    config.validate()?;
    let mut rng = RandomSource::from_seed(seed);
    let mut swarm = init_swarm(problem, config, &mut rng)?;
    let mut trace = vec![initial_record(&swarm)];
    let mut termination = Termination::MaxIter;
    for _ in 0..config.nmax {
        let outcome = step(&mut swarm, problem, config, &mut rng)?;
        trace.push(outcome.record);
        let lone_stationary = swarm.n_active() == 1
            && outcome.moves.iter().all(|m| m.status == MoveStatus::Stationary);
        if lone_stationary {
            termination = Termination::SingleStationaryAgent;
            break;
        }
        if outcome.minimizer_displacement <= config.tolres {
            termination = Termination::Residual;
            break;
        }
    }
    let best = swarm.minimizer();
    Ok(RunResult {
        best_position: best.position.clone(),
        best_value: swarm.f_min(),
        iterations_used: swarm.iteration,
        termination,
        trace,
        seed,
        metadata: RunMetadata::new(problem, config),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_benchmark, BenchmarkId};
    use crate::problem::SearchBox;
    use crate::swarm::Agent;

    fn quadratic(dim: usize, k: f64) -> Problem {
        Problem::from_fns(
            move |x: &[f64]| 0.5 * k * x.iter().map(|v| v * v).sum::<f64>(),
            move |x: &[f64]| x.iter().map(|v| k * v).collect(),
            SearchBox::cube(dim, -3.0, 3.0).unwrap(),
        )
        .unwrap()
        .with_known_minimizer(vec![0.0; dim])
        .unwrap()
    }

    #[test]
    fn lone_agent_does_gradient_descent() {
        let problem = quadratic(3, 4.0);
        let config = SolverConfig::default().with_agents(1);
        let mut rng = RandomSource::from_seed(3);
        let mut swarm = init_swarm(&problem, &config, &mut rng).unwrap();
        let x0 = swarm.agents[0].position.clone();
        let untouched = rng.clone();
        let out = step(&mut swarm, &problem, &config, &mut rng).unwrap();
        assert_eq!(rng, untouched);
        let mv = &out.moves[0];
        assert_eq!((mv.status, mv.m_rel, mv.r), (MoveStatus::Moved, 1.0, 1.0));
        for (x, x_0) in swarm.agents[0].position.iter().zip(&x0) {
            assert_eq!(*x, x_0 - mv.h * 4.0 * x_0);
        }
    }

    #[test]
    fn flat_swarm_keeps_masses_and_moves_everyone() {
        let problem = quadratic(2, 1.0);
        let agents = vec![
            Agent { position: vec![1.0, 0.0], mass: 0.5, active: true },
            Agent { position: vec![0.0, -1.0], mass: 0.5, active: true },
        ];
        let mut swarm = SwarmState::from_agents(&problem, agents).unwrap();
        let config = SolverConfig::default().with_agents(2);
        let out = step(&mut swarm, &problem, &config, &mut RandomSource::from_seed(0)).unwrap();
        assert_eq!((swarm.agents[0].mass, swarm.agents[1].mass), (0.5, 0.5));
        assert!(out.moves.iter().all(|m| m.status == MoveStatus::Moved));
    }

    #[test]
    fn quadratic_single_agent_converges_on_residual() {
        let problem = quadratic(2, 0.5);
        let config = SolverConfig { tolres: 1e-8, ..SolverConfig::default().with_agents(1) };
        let res = run(&problem, &config, 5).unwrap();
        assert_eq!(res.termination, Termination::Residual);
        assert!(res.best_value < 1e-12);
        for w in res.trace.windows(2) {
            assert!(w[1].f_min < w[0].f_min || w[1].f_min == 0.0);
        }
    }

    #[test]
    fn exact_newton_step_leaves_a_stationary_agent() {
        // With K = 1 and h0 = 1 the first step lands on the minimizer.
        let problem = quadratic(2, 1.0);
        let res = run(&problem, &SolverConfig::default().with_agents(1), 5).unwrap();
        assert_eq!(res.termination, Termination::SingleStationaryAgent);
        assert_eq!(res.best_value, 0.0);
        assert_eq!(res.iterations_used, 2);
    }

    #[test]
    fn zero_iterations_return_initial_best() {
        let problem = make_benchmark(BenchmarkId::Ackley, 3).unwrap();
        let config = SolverConfig { nmax: 0, ..SolverConfig::default().with_agents(5) };
        let res = run(&problem, &config, 17).unwrap();
        let swarm = init_swarm(&problem, &config, &mut RandomSource::from_seed(17)).unwrap();
        assert_eq!(res.iterations_used, 0);
        assert_eq!(res.termination, Termination::MaxIter);
        assert_eq!(res.best_position, swarm.minimizer().position);
        assert_eq!(res.trace.len(), 1);
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let problem = make_benchmark(BenchmarkId::Rastrigin, 4).unwrap();
        let config = SolverConfig::default().with_agents(20);
        let a = run(&problem, &config, 99).unwrap();
        let b = run(&problem, &config, 99).unwrap();
        assert_eq!(a, b);
        let bits = |r: &RunResult| r.trace.iter().map(|t| t.f_min.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn lone_stationary_agent_terminates() {
        let problem = quadratic(2, 1.0);
        let agents = vec![Agent { position: vec![0.0, 0.0], mass: 1.0, active: true }];
        let mut swarm = SwarmState::from_agents(&problem, agents).unwrap();
        let config = SolverConfig::default().with_agents(1);
        let out = step(&mut swarm, &problem, &config, &mut RandomSource::from_seed(0)).unwrap();
        assert_eq!(out.moves[0].status, MoveStatus::Stationary);
        assert_eq!(out.minimizer_displacement, 0.0);
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let problem = quadratic(2, 1.0);
        let config = SolverConfig { gamma: 1.5, ..SolverConfig::default() };
        assert!(matches!(run(&problem, &config, 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn non_finite_objective_is_reported() {
        let problem = Problem::from_fns(
            |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { x[0] * x[0] },
            |x: &[f64]| vec![2.0 * x[0]],
            SearchBox::cube(1, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        let config = SolverConfig::default().with_agents(8);
        assert!(matches!(run(&problem, &config, 2), Err(Error::NonFinite { .. })));
    }
}
