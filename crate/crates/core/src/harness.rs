//! Multi-run success-rate experiments over grids of agents, `q` and modes.
//!
//! Run `r` of a cell uses the seed
//! `splitmix64(splitmix64(splitmix64(base_seed) ^ cell_key) ^ r)`, where
//! `cell_key` hashes the cell's coordinates (function, dimension, agents,
//! `q`, mode). Seeds therefore depend neither on the thread count nor on
//! the other cells of the grid.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::objectives::{make_benchmark_in, BenchmarkId};
use crate::problem::{distance, Problem};
use crate::rng::splitmix64;
use crate::solver::run;

/// Radius of the success ball around the known minimizer.
pub const SUCCESS_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub function: BenchmarkId,
    pub dim: usize,
    pub agents: Vec<usize>,
    pub q_values: Vec<f64>,
    pub modes: Vec<Mode>,
    pub runs: usize,
    pub base_seed: u64,
    /// Overrides the benchmark's default initialization interval.
    pub init_bounds: Option<(f64, f64)>,
    pub success_radius: f64,
    /// Remaining solver knobs; agents, `q` and mode are set per cell.
    pub solver: SolverConfig,
}

impl ExperimentSpec {
    pub fn new(function: BenchmarkId, dim: usize) -> Self {
        Self {
            function,
            dim,
            agents: vec![25],
            q_values: vec![2.0],
            modes: vec![Mode::Sbrd],
            runs: 200,
            base_seed: 0,
            init_bounds: None,
            success_radius: SUCCESS_RADIUS,
            solver: SolverConfig::default(),
        }
    }

    pub fn agents(mut self, agents: impl Into<Vec<usize>>) -> Self {
        self.agents = agents.into();
        self
    }

    pub fn q_values(mut self, q: impl Into<Vec<f64>>) -> Self {
        self.q_values = q.into();
        self
    }

    pub fn modes(mut self, modes: impl Into<Vec<Mode>>) -> Self {
        self.modes = modes.into();
        self
    }

    pub fn runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn base_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn init_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.init_bounds = Some((lo, hi));
        self
    }

    pub fn problem(&self) -> Result<Problem> {
        let (lo, hi) = self.init_bounds.unwrap_or_else(|| self.function.default_bounds());
        make_benchmark_in(self.function, self.dim, lo, hi)
    }

    /// Grid cells in output order: agents, then `q`, then mode.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &agents in &self.agents {
            for &q in &self.q_values {
                for &mode in &self.modes {
                    cells.push(Cell { function: self.function, dim: self.dim, agents, q, mode });
                }
            }
        }
        cells
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(self.success_radius > 0.0) {
            return Err(Error::InvalidConfig(format!("success radius must be positive, got {}", self.success_radius)));
        }
        if self.agents.is_empty() || self.q_values.is_empty() || self.modes.is_empty() {
            return Err(Error::InvalidConfig("agents, q and mode grids must be nonempty".into()));
        }
        self.problem()?;
        for cell in self.cells() {
            cell.config(&self.solver).validate()?;
        }
        Ok(())
    }
}

/// One coordinate of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub function: BenchmarkId,
    pub dim: usize,
    pub agents: usize,
    pub q: f64,
    pub mode: Mode,
}

impl Cell {
    pub fn key(&self) -> u64 {
        let mode = match self.mode {
            Mode::Sbrd => 1,
            Mode::Sbgd => 2,
        };
        let function = BenchmarkId::ALL.iter().position(|&f| f == self.function).unwrap_or(0) as u64;
        [function, self.dim as u64, self.agents as u64, self.q.to_bits(), mode]
            .into_iter()
            .fold(0u64, |h, v| splitmix64(h ^ v))
    }

    pub fn config(&self, base: &SolverConfig) -> SolverConfig {
        base.clone().with_agents(self.agents).with_q(self.q).with_mode(self.mode)
    }
}

pub fn cell_seed(base_seed: u64, cell: &Cell, run: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ cell.key()) ^ run as u64)
}

/// True when `|x_sol - x_star| <= radius`.
pub fn success_check(x_sol: &[f64], x_star: &[f64], radius: f64) -> Result<bool> {
    if x_sol.len() != x_star.len() {
        return Err(Error::LengthMismatch { expected: x_star.len(), got: x_sol.len() });
    }
    Ok(distance(x_sol, x_star) <= radius)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RunOutcome {
    success: bool,
    errored: bool,
    iterations: u64,
    evals: u64,
    grad_evals: u64,
    seconds: f64,
}

fn run_one(problem: &Problem, config: &SolverConfig, seed: u64, radius: f64) -> RunOutcome {
    let start = Instant::now();
    let x_star = problem.known_minimizer().unwrap_or_default();
    let outcome = run(problem, config, seed).and_then(|res| {
        let success = success_check(&res.best_position, x_star, radius)?;
        let last = res.trace.last().expect("trace holds the initial record");
        Ok((success, res.iterations_used as u64, last.total_evals, last.total_grad_evals))
    });
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((success, iterations, evals, grad_evals)) => {
            RunOutcome { success, errored: false, iterations, evals, grad_evals, seconds }
        }
        Err(_) => RunOutcome { success: false, errored: true, iterations: 0, evals: 0, grad_evals: 0, seconds },
    }
}

/// Aggregated statistics of one cell.
///
/// Means are taken over runs that completed without error; errored runs
/// still count in `runs`, so they lower `rate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub function: BenchmarkId,
    pub dim: usize,
    pub agents: usize,
    pub q: f64,
    pub mode: Mode,
    pub runs: usize,
    pub successes: usize,
    pub rate: f64,
    pub mean_iters: f64,
    pub mean_fevals: f64,
    pub mean_gevals: f64,
    pub errors: usize,
    pub base_seed: u64,
    /// Summed wall-clock time of the cell's runs. Not serialized.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

// Timing varies between executions and is excluded from equality.
impl PartialEq for CellResult {
    fn eq(&self, other: &Self) -> bool {
        self.function == other.function
            && self.dim == other.dim
            && self.agents == other.agents
            && self.q.to_bits() == other.q.to_bits()
            && self.mode == other.mode
            && self.runs == other.runs
            && self.successes == other.successes
            && self.rate.to_bits() == other.rate.to_bits()
            && self.mean_iters.to_bits() == other.mean_iters.to_bits()
            && self.mean_fevals.to_bits() == other.mean_fevals.to_bits()
            && self.mean_gevals.to_bits() == other.mean_gevals.to_bits()
            && self.errors == other.errors
            && self.base_seed == other.base_seed
    }
}

impl CellResult {
    fn aggregate(cell: &Cell, base_seed: u64, outcomes: &[RunOutcome]) -> Self {
        let runs = outcomes.len();
        let successes = outcomes.iter().filter(|o| o.success).count();
        let errors = outcomes.iter().filter(|o| o.errored).count();
        let completed = (runs - errors).max(1) as f64;
        let sum = |f: fn(&RunOutcome) -> u64| outcomes.iter().filter(|o| !o.errored).map(f).sum::<u64>() as f64;
        Self {
            function: cell.function,
            dim: cell.dim,
            agents: cell.agents,
            q: cell.q,
            mode: cell.mode,
            runs,
            successes,
            rate: successes as f64 / runs as f64,
            mean_iters: sum(|o| o.iterations) / completed,
            mean_fevals: sum(|o| o.evals) / completed,
            mean_gevals: sum(|o| o.grad_evals) / completed,
            errors,
            base_seed,
            wall_time_secs: outcomes.iter().map(|o| o.seconds).sum(),
        }
    }
}

/// Settings shared by every cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub solver: SolverConfig,
    pub init_lower: f64,
    pub init_upper: f64,
    pub success_radius: f64,
    pub elimination_threshold: String,
    pub merge_before_transfer: bool,
    pub seed_derivation: String,
}

impl ExperimentMetadata {
    fn new(spec: &ExperimentSpec) -> Self {
        let (lo, hi) = spec.init_bounds.unwrap_or_else(|| spec.function.default_bounds());
        Self {
            solver: spec.solver.clone(),
            init_lower: lo,
            init_upper: hi,
            success_radius: spec.success_radius,
            elimination_threshold: "tolm/initial_agents".into(),
            merge_before_transfer: true,
            seed_derivation: "splitmix64(splitmix64(splitmix64(base_seed) ^ cell_key) ^ run)".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub metadata: ExperimentMetadata,
    pub cells: Vec<CellResult>,
}

/// Runs a single cell sequentially.
pub fn run_cell(spec: &ExperimentSpec, cell: &Cell) -> Result<CellResult> {
    spec.validate()?;
    let problem = spec.problem()?;
    let config = cell.config(&spec.solver);
    let outcomes: Vec<RunOutcome> = (0..spec.runs)
        .map(|r| run_one(&problem, &config, cell_seed(spec.base_seed, cell, r), spec.success_radius))
        .collect();
    Ok(CellResult::aggregate(cell, spec.base_seed, &outcomes))
}

/// Runs every cell of the grid on a pool of `threads` workers.
///
/// Results are identical for every thread count.
pub fn run_experiment(spec: &ExperimentSpec, threads: usize) -> Result<BenchResult> {
    spec.validate()?;
    let problem = spec.problem()?;
    let cells = spec.cells();
    let configs: Vec<SolverConfig> = cells.iter().map(|c| c.config(&spec.solver)).collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..spec.runs).map(move |r| (c, r))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    let outcomes: Vec<RunOutcome> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                run_one(&problem, &configs[c], cell_seed(spec.base_seed, &cells[c], r), spec.success_radius)
            })
            .collect()
    });

    let cells = cells
        .iter()
        .zip(outcomes.chunks(spec.runs))
        .map(|(cell, chunk)| CellResult::aggregate(cell, spec.base_seed, chunk))
        .collect();
    Ok(BenchResult { metadata: ExperimentMetadata::new(spec), cells })
}

/// Column order of the CSV output.
pub const CSV_HEADER: &str =
    "function,dim,agents,q,mode,runs,successes,rate,mean_iters,mean_fevals,mean_gevals,errors,base_seed";

pub fn write_csv<W: Write>(cells: &[CellResult], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for cell in cells {
        w.serialize(cell)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> csv::Result<Vec<CellResult>> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

pub fn write_json<W: Write>(result: &BenchResult, writer: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(writer, result)
}

pub fn read_json<R: Read>(reader: R) -> serde_json::Result<BenchResult> {
    serde_json::from_reader(reader)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn success_ball_is_closed() {
        assert!(success_check(&[1.0, 2.0], &[1.0, 2.0], 0.1).unwrap());
        assert!(success_check(&[0.1, 0.0], &[0.0, 0.0], 0.1).unwrap());
        assert!(!success_check(&[0.08, 0.08], &[0.0, 0.0], 0.1).unwrap());
        assert!(success_check(&[0.0], &[0.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn grid_expands_in_documented_order() {
        let spec = ExperimentSpec::new(BenchmarkId::Ackley, 4)
            .agents([10, 25])
            .q_values([2.0, 8.0])
            .modes([Mode::Sbrd, Mode::Sbgd]);
        let cells = spec.cells();
        assert_eq!(cells.len(), 8);
        assert_eq!((cells[0].agents, cells[0].q, cells[0].mode), (10, 2.0, Mode::Sbrd));
        assert_eq!((cells[1].agents, cells[1].q, cells[1].mode), (10, 2.0, Mode::Sbgd));
        assert_eq!((cells[2].agents, cells[2].q), (10, 8.0));
        assert_eq!(cells[7].agents, 25);
    }

    #[test]
    fn seeds_are_pairwise_distinct() {
        let spec = ExperimentSpec::new(BenchmarkId::Ackley, 12)
            .agents([10, 25, 50, 100])
            .q_values([2.0, 4.0, 8.0])
            .modes([Mode::Sbrd, Mode::Sbgd]);
        let mut seen = std::collections::HashSet::new();
        for cell in spec.cells() {
            for r in 0..500 {
                assert!(seen.insert(cell_seed(7, &cell, r)));
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ExperimentSpec::new(BenchmarkId::Ackley, 2).runs(0).validate().is_err());
        assert!(ExperimentSpec::new(BenchmarkId::Rosenbrock, 1).validate().is_err());
        let mut spec = ExperimentSpec::new(BenchmarkId::Ackley, 2);
        spec.success_radius = 0.0;
        assert!(spec.validate().is_err());
        assert!(ExperimentSpec::new(BenchmarkId::Ackley, 2).q_values([0.5]).validate().is_err());
        assert!(ExperimentSpec::new(BenchmarkId::Ackley, 2).init_bounds(1.0, -1.0).validate().is_err());
    }

    #[test]
    fn deterministic_success_case() {
        // Convex inside the box, so one run always lands on the minimizer.
        let spec = ExperimentSpec::new(BenchmarkId::Rastrigin, 1).agents([5]).runs(1).init_bounds(-0.1, 0.1);
        let res = run_experiment(&spec, 1).unwrap();
        assert_eq!(res.cells[0].rate, 1.0);
    }

    #[test]
    fn csv_header_is_exact() {
        let spec = ExperimentSpec::new(BenchmarkId::StyblinskiTang, 2).agents([5]).runs(2);
        let res = run_experiment(&spec, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&res.cells, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(text.lines().nth(1).unwrap().starts_with("styblinski,2,5,2.0,sbrd,2,"));
    }
}
