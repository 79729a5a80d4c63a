//! Agents, swarm state and random initialization.

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    pub mass: f64,
    /// Cleared once the agent is eliminated or merged into another one.
    pub active: bool,
}

/// Active agent set at one iteration.
///
/// Agents keep their slot for the whole run, so an index identifies the same
/// agent across iterations. `f_values[i]` caches `F(agents[i].position)`;
/// entries of inactive agents are stale and must not be read.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub agents: Vec<Agent>,
    pub f_values: Vec<f64>,
    pub iteration: usize,
    pub minimizer_index: usize,
    pub heaviest_index: usize,
    /// Population size at initialization, used by the elimination threshold.
    pub n_initial: usize,
    /// Cumulative objective evaluations, initialization included.
    pub evals: u64,
    pub grad_evals: u64,
}

impl SwarmState {
    /// Builds a state from explicit agents, evaluating the objective at each.
    pub fn from_agents(problem: &Problem, agents: Vec<Agent>) -> Result<Self> {
        if agents.iter().all(|a| !a.active) {
            return Err(Error::InvalidConfig("swarm needs at least one active agent".into()));
        }
        for a in &agents {
            if a.position.len() != problem.dim() {
                return Err(Error::LengthMismatch { expected: problem.dim(), got: a.position.len() });
            }
        }
        let f_values: Vec<f64> = agents.iter().map(|a| problem.value(&a.position)).collect();
        let mut state = Self {
            n_initial: agents.len(),
            evals: agents.len() as u64,
            agents,
            f_values,
            iteration: 0,
            minimizer_index: 0,
            heaviest_index: 0,
            grad_evals: 0,
        };
        state.refresh_indices();
        Ok(state)
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.agents.iter().enumerate().filter(|(_, a)| a.active).map(|(i, _)| i).collect()
    }

    pub fn n_active(&self) -> usize {
        self.agents.iter().filter(|a| a.active).count()
    }

    /// Cached objective values of the active agents, in index order.
    pub fn active_f_values(&self) -> Vec<f64> {
        self.active_indices().into_iter().map(|i| self.f_values[i]).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.agents.iter().filter(|a| a.active).map(|a| a.mass).sum()
    }

    /// Recomputes the minimizer (lowest F, first index on ties) and the
    /// heaviest agent (largest mass, first index on ties).
    pub fn refresh_indices(&mut self) {
        let mut min_i: Option<usize> = None;
        let mut heavy_i: Option<usize> = None;
        for (i, a) in self.agents.iter().enumerate().filter(|(_, a)| a.active) {
            match min_i {
                Some(j) if self.f_values[i] >= self.f_values[j] => {}
                _ => min_i = Some(i),
            }
            match heavy_i {
                Some(j) if a.mass <= self.agents[j].mass => {}
                _ => heavy_i = Some(i),
            }
        }
        self.minimizer_index = min_i.unwrap_or(0);
        self.heaviest_index = heavy_i.unwrap_or(0);
    }

    pub fn f_min(&self) -> f64 {
        self.f_values[self.minimizer_index]
    }

    pub fn f_max(&self) -> f64 {
        self.active_indices()
            .into_iter()
            .map(|i| self.f_values[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn minimizer(&self) -> &Agent {
        &self.agents[self.minimizer_index]
    }
}

/// Places `N` agents uniformly at random in the problem's box, each with mass `1/N`.
pub fn init_swarm(problem: &Problem, config: &SolverConfig, rng: &mut RandomSource) -> Result<SwarmState> {
    if problem.dim() < 1 {
        return Err(Error::Dimension { min: 1, got: problem.dim() });
    }
    if config.n_agents < 1 {
        return Err(Error::InvalidConfig("agents must be at least 1".into()));
    }
    let bx = problem.init_box();
    let mass = 1.0 / config.n_agents as f64;
    let agents = (0..config.n_agents)
        .map(|_| {
            let position = bx
                .lower()
                .iter()
                .zip(bx.upper())
                .map(|(&lo, &hi)| rng.uniform(lo, hi))
                .collect();
            Agent { position, mass, active: true }
        })
        .collect();
    SwarmState::from_agents(problem, agents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SearchBox;

    fn bowl(dim: usize) -> Problem {
        Problem::from_fns(
            |x: &[f64]| x.iter().map(|v| v * v).sum(),
            |x: &[f64]| x.iter().map(|v| 2.0 * v).collect(),
            SearchBox::cube(dim, -3.0, 3.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn four_agents_split_mass_evenly() {
        let cfg = SolverConfig::default().with_agents(4);
        let s = init_swarm(&bowl(2), &cfg, &mut RandomSource::from_seed(1)).unwrap();
        assert!(s.agents.iter().all(|a| a.mass == 0.25 && a.active));
        assert_eq!(s.total_mass(), 1.0);
    }

    #[test]
    fn singleton_is_minimizer_and_heaviest() {
        let cfg = SolverConfig::default().with_agents(1);
        let s = init_swarm(&bowl(3), &cfg, &mut RandomSource::from_seed(1)).unwrap();
        assert_eq!(s.agents[0].mass, 1.0);
        assert_eq!((s.minimizer_index, s.heaviest_index), (0, 0));
    }

    #[test]
    fn same_seed_same_positions() {
        let cfg = SolverConfig::default().with_agents(2);
        let a = init_swarm(&bowl(2), &cfg, &mut RandomSource::from_seed(42)).unwrap();
        let b = init_swarm(&bowl(2), &cfg, &mut RandomSource::from_seed(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn positions_inside_box_and_mass_sums_to_one() {
        let problem = bowl(5);
        for n in [1, 3, 7, 10, 33, 100] {
            let cfg = SolverConfig::default().with_agents(n);
            let s = init_swarm(&problem, &cfg, &mut RandomSource::from_seed(n as u64)).unwrap();
            assert!((s.total_mass() - 1.0).abs() <= 1e-15);
            assert!(s.agents.iter().all(|a| problem.init_box().contains(&a.position)));
            let fmin = s.active_f_values().into_iter().fold(f64::INFINITY, f64::min);
            assert_eq!(s.f_min(), fmin);
        }
    }

    #[test]
    fn rejects_zero_agents() {
        let cfg = SolverConfig::default().with_agents(0);
        assert!(init_swarm(&bowl(2), &cfg, &mut RandomSource::from_seed(0)).is_err());
    }
}
