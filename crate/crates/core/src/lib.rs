//! Swarm-based random descent (SBRD) and swarm-based gradient descent (SBGD).
//!
//! A swarm of agents, each carrying a position and a mass, descends a
//! non-convex objective. Every iteration high agents shed mass to the current
//! minimizer; each agent then takes a backtracked step whose size and
//! direction spread depend on its mass relative to the heaviest agent. Light
//! agents take long steps in directions drawn from a cap around the gradient,
//! heavy agents follow the gradient closely.
//!
//! ```
//! use swarm_descent::{make_benchmark, run, BenchmarkId, SolverConfig};
//!
//! let problem = make_benchmark(BenchmarkId::StyblinskiTang, 2).unwrap();
//! let config = SolverConfig::default().with_agents(25);
//! let result = run(&problem, &config, 7).unwrap();
//! assert!(result.best_value <= result.trace[0].f_min);
//! ```

pub mod cli;
pub mod config;
pub mod direction;
pub mod error;
pub mod harness;
pub mod linesearch;
pub mod mass;
pub mod objectives;
pub mod problem;
pub mod rng;
pub mod selfcheck;
pub mod solver;
pub mod swarm;

pub use config::{Mode, SolverConfig};
pub use error::{Error, Result};
pub use harness::{run_experiment, success_check, BenchResult, CellResult, ExperimentSpec};
pub use objectives::{finite_diff_gradient, make_benchmark, make_benchmark_in, BenchmarkId};
pub use problem::{Objective, Problem, SearchBox};
pub use rng::RandomSource;
pub use solver::{run, step, IterationRecord, RunResult, Termination};
pub use swarm::{init_swarm, Agent, SwarmState};
