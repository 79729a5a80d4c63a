//! Command-line front end: `run`, `bench` and `check`.
//!
//! Settings resolve in three layers: built-in defaults, then a flat
//! `key=value` config file (`--config`), then flags on the command line.
//! `SWARM_SEED` in the environment replaces `--seed` when set.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{error::ErrorKind, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{Mode, SolverConfig};
use crate::error::Error;
use crate::harness::{self, ExperimentSpec, SUCCESS_RADIUS};
use crate::objectives::{make_benchmark, make_benchmark_in, BenchmarkId};
use crate::selfcheck;
use crate::solver::{run, IterationRecord, RunMetadata, Termination};

pub const SEED_ENV: &str = "SWARM_SEED";

/// Comma-separated list; a repeated flag replaces the earlier list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T>(pub Vec<T>);

impl<T: FromStr> FromStr for Grid<T>
where
    T::Err: fmt::Display,
{
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<T>().map_err(|e| Error::InvalidConfig(format!("'{t}': {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if items.is_empty() {
            return Err(Error::InvalidConfig("empty list".into()));
        }
        Ok(Grid(items))
    }
}

/// `sbrd`, `sbgd`, a comma list of those, or `both`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeList(pub Vec<Mode>);

impl FromStr for ModeList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("both") {
            return Ok(ModeList(vec![Mode::Sbrd, Mode::Sbgd]));
        }
        Grid::<Mode>::from_str(s).map(|g| ModeList(g.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandKind {
    Run,
    Bench,
    Check,
}

#[derive(Debug, Parser)]
#[command(name = "sbrd", version, about = "Swarm-based random and gradient descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one trajectory and write its per-iteration trace
    #[command(args_override_self = true)]
    Run(RunArgs),
    /// Sweep a grid of cells and report success rates
    #[command(args_override_self = true)]
    Bench(BenchArgs),
    /// Run the gradient, conservation and step invariant self-tests
    #[command(args_override_self = true)]
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Benchmark: ackley, rastrigin, rosenbrock or styblinski
    #[arg(long, default_value = "ackley")]
    function: BenchmarkId,
    /// Dimension
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Number of agents (comma list for bench)
    #[arg(long, default_value = "25")]
    agents: Grid<usize>,
    /// Mass transfer exponent (comma list for bench)
    #[arg(long, default_value = "2")]
    q: Grid<f64>,
    /// sbrd, sbgd, comma list or both
    #[arg(long, default_value = "sbrd")]
    mode: ModeList,
    /// Base seed; SWARM_SEED overrides it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lower edge of the initialization cube [default: benchmark box]
    #[arg(long, allow_negative_numbers = true)]
    box_lo: Option<f64>,
    /// Upper edge of the initialization cube [default: benchmark box]
    #[arg(long, allow_negative_numbers = true)]
    box_hi: Option<f64>,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: from --out extension, else csv for bench and json for run]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// key=value file whose entries sit below the command-line flags [default: none]
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Step-size scale of the descent guard
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Backtracking shrink factor
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Initial trial step
    #[arg(long, default_value_t = 1.0)]
    h0: f64,
    /// Elimination threshold, divided by the initial agent count
    #[arg(long, default_value_t = 1e-4)]
    tolm: f64,
    /// Merge distance
    #[arg(long, default_value_t = 1e-3)]
    tolmerge: f64,
    /// Minimizer displacement that stops the run
    #[arg(long, default_value_t = 1e-4)]
    tolres: f64,
    /// Maximum number of iterations
    #[arg(long, default_value_t = 200)]
    nmax: usize,
    /// Regularizer of the transfer fraction denominator
    #[arg(long, default_value_t = 1e-12)]
    epsilon: f64,
    /// Gradient norm below which an agent stays put
    #[arg(long, default_value_t = 1e-12)]
    grad_floor: f64,
    /// Cap on backtracking shrinks per move
    #[arg(long, default_value_t = 100)]
    max_shrinks: usize,
    /// Drop the 1/2 factor from the descent guard [default: off]
    #[arg(long)]
    full_descent: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: ProblemArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Independent runs per cell
    #[arg(long, default_value_t = 200)]
    runs: usize,
    /// Worker threads, 0 for all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Success radius around the known minimizer
    #[arg(long, default_value_t = SUCCESS_RADIUS)]
    success_radius: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct CheckArgs {
    /// Seed of the self-test samples; SWARM_SEED overrides it
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliConfig {
    pub subcommand: SubcommandKind,
    pub function: BenchmarkId,
    pub dim: usize,
    pub agents: Vec<usize>,
    pub q: Vec<f64>,
    pub modes: Vec<Mode>,
    /// Agents, `q` and mode hold the first grid entry.
    pub solver: SolverConfig,
    pub runs: usize,
    pub seed: u64,
    pub box_lo: Option<f64>,
    pub box_hi: Option<f64>,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub success_radius: f64,
}

#[derive(Debug)]
pub enum CliError {
    /// Help or version text; not a failure.
    Info(String),
    Usage(String),
    Runtime(String),
    SelfTest(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::SelfTest(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Info(s) | CliError::Usage(s) | CliError::Runtime(s) | CliError::SelfTest(s) => {
                f.write_str(s.trim_end())
            }
        }
    }
}

impl std::error::Error for CliError {}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("error: {msg}"))
}

fn runtime(msg: impl fmt::Display) -> CliError {
    CliError::Runtime(format!("error: {msg}"))
}

fn from_clap(err: clap::Error) -> CliError {
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(err.to_string()),
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Usage(err.to_string()),
        _ => {
            // The first line carries the diagnostic; the rest is usage text.
            let first = err.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            CliError::Usage(first)
        }
    }
}

const SWITCHES: &[&str] = &["full-descent"];

/// Turns config file lines into flags. Blank lines and `#` comments are skipped.
pub fn config_file_args(text: &str) -> Result<Vec<String>, CliError> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(usage(format!("config line {}: nested config files are not supported", lineno + 1)));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" | "1" | "yes" => args.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(usage(format!("config line {}: '{key}' takes true or false", lineno + 1))),
            }
        } else {
            args.push(format!("--{key}={value}"));
        }
    }
    Ok(args)
}

fn parse_cli(argv: &[String]) -> Result<Cli, CliError> {
    let matches = Cli::command().try_get_matches_from(argv).map_err(from_clap)?;
    Cli::from_arg_matches(&matches).map_err(from_clap)
}

/// Parses `argv` (program name first), reading `SWARM_SEED` from the environment.
pub fn parse_args<I, S>(argv: I) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    parse_args_with_env(argv, env_seed.as_deref())
}

pub fn parse_args_with_env<I, S>(argv: I, env_seed: Option<&str>) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    if argv.is_empty() {
        argv.push("sbrd".into());
    }
    let mut cli = parse_cli(&argv)?;

    let config_path = match &cli.command {
        Command::Run(a) => a.common.config.clone(),
        Command::Bench(a) => a.common.config.clone(),
        Command::Check(_) => None,
    };
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let extra = config_file_args(&text)?;
        let name = match cli.command {
            Command::Run(_) => "run",
            Command::Bench(_) => "bench",
            Command::Check(_) => "check",
        };
        let pos = argv.iter().skip(1).position(|a| a == name).map(|p| p + 2).unwrap_or(argv.len());
        // File entries go first so later command-line flags override them.
        argv.splice(pos..pos, extra);
        cli = parse_cli(&argv)?;
    }

    let mut config = resolve(cli)?;
    if let Some(s) = env_seed {
        config.seed = s
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV}='{s}' is not an unsigned integer")))?;
    }
    Ok(config)
}

fn resolve(cli: Cli) -> Result<CliConfig, CliError> {
    let (subcommand, common, runs, threads, success_radius) = match cli.command {
        Command::Check(c) => {
            let defaults = SolverConfig::default();
            return Ok(CliConfig {
                subcommand: SubcommandKind::Check,
                function: BenchmarkId::Ackley,
                dim: 2,
                agents: vec![defaults.n_agents],
                q: vec![defaults.q_exponent],
                modes: vec![defaults.mode],
                solver: defaults,
                runs: 0,
                seed: c.seed,
                box_lo: None,
                box_hi: None,
                threads: 1,
                out: None,
                format: Format::Json,
                success_radius: SUCCESS_RADIUS,
            });
        }
        Command::Run(a) => (SubcommandKind::Run, a.common, 1, 1, SUCCESS_RADIUS),
        Command::Bench(a) => (SubcommandKind::Bench, a.common, a.runs, a.threads, a.success_radius),
    };

    let s = &common.solver;
    let solver = SolverConfig {
        n_agents: common.agents.0[0],
        q_exponent: common.q.0[0],
        lambda: s.lambda,
        gamma: s.gamma,
        h0: s.h0,
        tolm: s.tolm,
        tolmerge: s.tolmerge,
        tolres: s.tolres,
        nmax: s.nmax,
        epsilon: s.epsilon,
        grad_floor: s.grad_floor,
        max_shrinks: s.max_shrinks,
        mode: common.mode.0[0],
        half_descent: !s.full_descent,
    };
    // Every grid point must be a valid solver configuration.
    for &n in &common.agents.0 {
        for &q in &common.q.0 {
            solver.clone().with_agents(n).with_q(q).validate().map_err(usage)?;
        }
    }
    if common.dim < common.function.min_dim() {
        return Err(usage(format!(
            "{} needs --dim of at least {}",
            common.function,
            common.function.min_dim()
        )));
    }
    let (lo, hi) = common.function.default_bounds();
    let (lo, hi) = (common.box_lo.unwrap_or(lo), common.box_hi.unwrap_or(hi));
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(usage(format!("initialization box [{lo}, {hi}] is empty or not finite")));
    }
    if subcommand == SubcommandKind::Run
        && (common.agents.0.len() > 1 || common.q.0.len() > 1 || common.mode.0.len() > 1)
    {
        return Err(usage("run takes a single value for --agents, --q and --mode"));
    }
    if subcommand == SubcommandKind::Bench {
        if runs == 0 {
            return Err(usage("--runs must be at least 1"));
        }
        if !(success_radius.is_finite() && success_radius > 0.0) {
            return Err(usage("--success-radius must be positive"));
        }
    }
    let format = common.format.unwrap_or_else(|| {
        match common.out.as_deref().and_then(Path::extension).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json" | "jsonl") => Format::Json,
            _ if subcommand == SubcommandKind::Bench => Format::Csv,
            _ => Format::Json,
        }
    });
    Ok(CliConfig {
        subcommand,
        function: common.function,
        dim: common.dim,
        agents: common.agents.0,
        q: common.q.0,
        modes: common.mode.0,
        solver,
        runs,
        seed: common.seed,
        box_lo: common.box_lo,
        box_hi: common.box_hi,
        threads,
        out: common.out,
        format,
        success_radius,
    })
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| runtime(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_context(out: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| match out {
        Some(p) => runtime(format!("writing {}: {e}", p.display())),
        None => runtime(format!("writing stdout: {e}")),
    }
}

const TRACE_HEADER: &str = "n,n_active,f_min,f_max,minimizer_pos,heaviest_mass,heaviest_prev_pos,total_evals,total_grad_evals,mean_step";

fn join_vec(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// One JSON object per line, or CSV with vectors joined by `;`.
pub fn write_trace<W: Write>(trace: &[IterationRecord], format: Format, mut w: W) -> io::Result<()> {
    match format {
        Format::Json => {
            for rec in trace {
                serde_json::to_writer(&mut w, rec)?;
                writeln!(w)?;
            }
        }
        Format::Csv => {
            writeln!(w, "{TRACE_HEADER}")?;
            for r in trace {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.n_active,
                    r.f_min,
                    r.f_max,
                    join_vec(&r.minimizer_pos),
                    r.heaviest_mass,
                    join_vec(&r.heaviest_prev_pos),
                    r.total_evals,
                    r.total_grad_evals,
                    r.mean_step
                )?;
            }
        }
    }
    w.flush()
}

#[derive(Serialize)]
struct RunSummary<'a> {
    function: BenchmarkId,
    dim: usize,
    seed: u64,
    best_position: &'a [f64],
    best_value: f64,
    distance_to_minimizer: Option<f64>,
    iterations_used: usize,
    termination: Termination,
    metadata: &'a RunMetadata,
    solver: &'a SolverConfig,
}

fn execute_run(config: &CliConfig) -> Result<(), CliError> {
    let problem = match (config.box_lo, config.box_hi) {
        (None, None) => make_benchmark(config.function, config.dim),
        _ => {
            let (lo, hi) = config.function.default_bounds();
            make_benchmark_in(config.function, config.dim, config.box_lo.unwrap_or(lo), config.box_hi.unwrap_or(hi))
        }
    }
    .map_err(usage)?;
    let result = run(&problem, &config.solver, config.seed).map_err(runtime)?;

    let out = config.out.as_deref();
    write_trace(&result.trace, config.format, open_output(out)?).map_err(io_context(out))?;

    let summary = RunSummary {
        function: config.function,
        dim: config.dim,
        seed: config.seed,
        best_position: &result.best_position,
        best_value: result.best_value,
        distance_to_minimizer: problem.known_minimizer().map(|x| crate::problem::distance(x, &result.best_position)),
        iterations_used: result.iterations_used,
        termination: result.termination,
        metadata: &result.metadata,
        solver: &config.solver,
    };
    let line = serde_json::to_string(&summary).map_err(runtime)?;
    // With the trace on stdout the summary moves to stderr.
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn execute_bench(config: &CliConfig) -> Result<(), CliError> {
    let mut spec = ExperimentSpec::new(config.function, config.dim)
        .agents(config.agents.clone())
        .q_values(config.q.clone())
        .modes(config.modes.clone())
        .runs(config.runs)
        .base_seed(config.seed);
    spec.solver = config.solver.clone();
    spec.success_radius = config.success_radius;
    if config.box_lo.is_some() || config.box_hi.is_some() {
        let (lo, hi) = config.function.default_bounds();
        spec = spec.init_bounds(config.box_lo.unwrap_or(lo), config.box_hi.unwrap_or(hi));
    }
    let threads = if config.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        config.threads
    };
    let result = harness::run_experiment(&spec, threads).map_err(runtime)?;
    for c in &result.cells {
        eprintln!(
            "{} d={} N={} q={} {}: {:.1}% ({}/{}), {:.1} iterations, {:.2}s",
            c.function,
            c.dim,
            c.agents,
            c.q,
            c.mode,
            100.0 * c.rate,
            c.successes,
            c.runs,
            c.mean_iters,
            c.wall_time_secs
        );
    }
    let out = config.out.as_deref();
    let writer = open_output(out)?;
    match config.format {
        Format::Csv => harness::write_csv(&result.cells, writer).map_err(|e| runtime(format!("writing results: {e}"))),
        Format::Json => harness::write_json(&result, writer).map_err(|e| runtime(format!("writing results: {e}"))),
    }
}

fn execute_check(config: &CliConfig) -> Result<(), CliError> {
    let outcomes = selfcheck::run_all(config.seed);
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        if !o.passed {
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelfTest(format!("self-test failed: {}", failed.join(", "))))
    }
}

pub fn execute(config: &CliConfig) -> Result<(), CliError> {
    match config.subcommand {
        SubcommandKind::Run => execute_run(config),
        SubcommandKind::Bench => execute_bench(config),
        SubcommandKind::Check => execute_check(config),
    }
}

pub fn main_with_args<I, S>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match parse_args(argv).and_then(|c| execute(&c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<CliConfig, CliError> {
        let mut argv = vec!["sbrd"];
        argv.extend_from_slice(args);
        parse_args_with_env(argv, None)
    }

    #[test]
    fn defaults() {
        let c = parse(&["run"]).unwrap();
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.format, Format::Json);
        let b = parse(&["bench"]).unwrap();
        assert_eq!(b.runs, 200);
        assert_eq!(b.format, Format::Csv);
    }

    #[test]
    fn table_cell_invocation() {
        let c = parse(&[
            "bench", "--function", "ackley", "--dim", "14", "--agents", "25", "--q", "2", "--mode", "sbrd", "--runs",
            "200", "--seed", "7",
        ])
        .unwrap();
        assert_eq!((c.function, c.dim, c.agents.clone(), c.q.clone()), (BenchmarkId::Ackley, 14, vec![25], vec![2.0]));
        assert_eq!((c.modes.clone(), c.runs, c.seed), (vec![Mode::Sbrd], 200, 7));
    }

    #[test]
    fn grids_and_repeats() {
        let c = parse(&["bench", "--q", "2,8", "--agents", "10", "--agents", "20,30", "--mode", "both"]).unwrap();
        assert_eq!(c.q, vec![2.0, 8.0]);
        assert_eq!(c.agents, vec![20, 30]);
        assert_eq!(c.modes, vec![Mode::Sbrd, Mode::Sbgd]);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        for args in [
            &["run", "--gamma", "1.5"][..],
            &["run", "--lambda", "0"],
            &["run", "--bogus", "1"],
            &["bench", "--runs", "0"],
            &["run", "--q", "2,8"],
            &["run", "--box-lo", "1", "--box-hi", "-1"],
            &["run", "--function", "sphere"],
            &[],
        ] {
            let err = parse(args).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{args:?}: {err}");
        }
    }

    #[test]
    fn help_is_not_an_error() {
        let err = parse(&["bench", "--help"]).unwrap_err();
        assert_eq!(err.exit_code(), 0);
        assert!(err.to_string().contains("--gamma"));
    }

    #[test]
    fn negative_box() {
        let c = parse(&["bench", "--box-lo", "-3", "--box-hi", "-1"]).unwrap();
        assert_eq!((c.box_lo, c.box_hi), (Some(-3.0), Some(-1.0)));
    }

    #[test]
    fn env_seed_wins() {
        let c = parse_args_with_env(["sbrd", "run", "--seed", "3"], Some("11")).unwrap();
        assert_eq!(c.seed, 11);
        assert!(parse_args_with_env(["sbrd", "run"], Some("x")).is_err());
    }

    #[test]
    fn config_file_layering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.cfg");
        std::fs::write(&path, "# sweep\ngamma = 0.8\nnmax=50\nfull_descent=true\ndim=4 # inline\n").unwrap();
        let p = path.to_str().unwrap();
        let c = parse(&["run", "--config", p, "--nmax", "70"]).unwrap();
        assert_eq!(c.solver.gamma, 0.8);
        assert_eq!(c.solver.nmax, 70);
        assert_eq!(c.dim, 4);
        assert!(!c.solver.half_descent);
        // Flags before --config still win.
        let c = parse(&["run", "--gamma", "0.5", "--config", p]).unwrap();
        assert_eq!(c.solver.gamma, 0.5);

        std::fs::write(&path, "speed=3\n").unwrap();
        assert_eq!(parse(&["run", "--config", p]).unwrap_err().exit_code(), 1);
        std::fs::write(&path, "gamma\n").unwrap();
        assert_eq!(parse(&["run", "--config", p]).unwrap_err().exit_code(), 1);
    }
}
