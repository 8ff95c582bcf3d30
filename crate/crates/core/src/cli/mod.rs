//! `centropy` command-line front end.
//!
//! Exit codes: 0 success, 2 malformed input file (CSV or graph JSON), 3
//! invalid parameters or mismatched graphs, 4 estimator failure, 1 I/O
//! failure while writing outputs. Usage errors are reported by clap with
//! its own exit code 2.

mod data;
mod manifest;

pub use data::{read_series_csv, write_series_csv, CsvError};
pub use manifest::RunManifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{self, SyntheticConfig, DEFAULT_BURN_IN};
use crate::discovery::{discover_network, BackwardMode, DiscoveryConfig, DiscoveryError, ForwardGate};
use crate::graph::{self, deserialize_json, evaluate, serialize, Format, GraphError};
use crate::information::{EstimatorKind, EstimatorSpec, DEFAULT_K_NEIGHBORS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_ESTIMATOR: i32 = 4;

pub const THREADS_ENV: &str = "CENTROPY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "centropy", version, about = "Causal network discovery by optimal causation entropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover a lagged causal network from a CSV time series.
    Discover(DiscoverArgs),
    /// Generate a synthetic time series with a known network.
    Synth(SynthArgs),
    /// Compare a predicted graph with a ground-truth graph.
    Eval(EvalArgs),
    /// Emit a Graphviz DOT rendering of a graph.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Gaussian,
    Knn,
    GeometricKnn,
    Kde,
    Poisson,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Gaussian => EstimatorKind::Gaussian,
            EstimatorArg::Knn => EstimatorKind::Knn,
            EstimatorArg::GeometricKnn => EstimatorKind::GeometricKnn,
            EstimatorArg::Kde => EstimatorKind::Kde,
            EstimatorArg::Poisson => EstimatorKind::Poisson,
        }
    }
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    /// Input CSV: header row of variable names, one row per time step.
    #[arg(long, required_unless_present = "from_manifest")]
    pub input: Option<PathBuf>,
    /// Output graph JSON; the edge table and manifest are written next to it.
    #[arg(long, required_unless_present = "from_manifest")]
    pub out: Option<PathBuf>,
    /// Re-run exactly the discovery recorded in a manifest.
    #[arg(long, conflicts_with_all = ["input", "out"])]
    pub from_manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub estimator: EstimatorArg,
    /// Neighbor count for the kNN estimators.
    #[arg(long, default_value_t = DEFAULT_K_NEIGHBORS)]
    pub k: usize,
    /// Sets both significance levels.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha_forward: Option<f64>,
    #[arg(long)]
    pub alpha_backward: Option<f64>,
    #[arg(long, default_value_t = crate::discovery::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = 1)]
    pub max_lag: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 gives identical output to any other count.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub no_standardize: bool,
    /// Exclude each node's own past from its candidate parents.
    #[arg(long)]
    pub no_self: bool,
    /// Repeat backward sweeps until no candidate is removed.
    #[arg(long)]
    pub fixpoint: bool,
    /// Forward-step significance gate.
    #[arg(long, value_enum, default_value = "max-statistic")]
    pub forward_gate: GateArg,
    /// Edge table CSV path (default: OUT with a .csv extension).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Also write a DOT rendering here.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Manifest path (default: OUT with a .manifest.json extension).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    Argmax,
    MaxStatistic,
}

impl From<GateArg> for ForwardGate {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::Argmax => ForwardGate::Argmax,
            GateArg::MaxStatistic => ForwardGate::MaxStatistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Linear,
    Poisson,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub generator: Generator,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long = "T", visible_alias = "t", default_value_t = 1000)]
    pub t: usize,
    #[arg(long, default_value_t = 0.7)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub self_loops: bool,
    #[arg(long, default_value_t = 1.0)]
    pub noise_std: f64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Data CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth graph JSON output.
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub predicted: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Compare (source, sink) pairs, merging edges that differ only by lag.
    #[arg(long)]
    pub ignore_lags: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Drop edges whose CMI is below this value.
    #[arg(long)]
    pub min_cmi: Option<f64>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn read_graph(path: &Path) -> Result<graph::CausalGraph, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    deserialize_json(&bytes).map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))
}

fn discovery_failure(e: DiscoveryError) -> Failure {
    match e {
        DiscoveryError::InvalidConfig(_) | DiscoveryError::TooFewVariables(_) | DiscoveryError::SeriesTooShort { .. } => {
            Failure::new(EXIT_INVALID, e.to_string())
        }
        DiscoveryError::NonFiniteInput { .. } => Failure::new(EXIT_MALFORMED, e.to_string()),
        DiscoveryError::Estimator { .. } => Failure::new(EXIT_ESTIMATOR, e.to_string()),
    }
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{ext}"))
}

impl DiscoverArgs {
    fn config(&self) -> DiscoveryConfig {
        let alpha_forward = self.alpha_forward.or(self.alpha).unwrap_or(crate::discovery::DEFAULT_ALPHA);
        let alpha_backward = self.alpha_backward.or(self.alpha).unwrap_or(crate::discovery::DEFAULT_ALPHA);
        let mut estimator = EstimatorSpec::new(self.estimator.into());
        estimator.k_neighbors = self.k;
        DiscoveryConfig {
            estimator,
            alpha_forward,
            alpha_backward,
            permutations: self.permutations,
            max_lag: self.max_lag,
            seed: self.seed,
            standardize: !self.no_standardize,
            include_self: !self.no_self,
            forward_gate: self.forward_gate.into(),
            backward_mode: if self.fixpoint { BackwardMode::Fixpoint } else { BackwardMode::SingleSweep },
        }
    }
}

/// Runs `f` on a pool of `threads` workers (or the global pool).
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        Some(0) => Err(Failure::new(EXIT_INVALID, "--threads must be at least 1")),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

struct DiscoverPlan {
    input: PathBuf,
    out: PathBuf,
    table: PathBuf,
    dot: Option<PathBuf>,
    manifest: PathBuf,
    config: DiscoveryConfig,
    threads: Option<usize>,
}

fn plan_discover(args: &DiscoverArgs) -> Result<DiscoverPlan, Failure> {
    if let Some(path) = &args.from_manifest {
        let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
        let m: RunManifest = serde_json::from_slice(&bytes)
            .map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
        return Ok(DiscoverPlan {
            input: m.input,
            table: m.outputs.table,
            dot: m.outputs.dot,
            manifest: path.clone(),
            out: m.outputs.graph,
            config: m.config,
            threads: args.threads.or(m.threads),
        });
    }
    let input = args.input.clone().expect("clap requires --input");
    let out = args.out.clone().expect("clap requires --out");
    Ok(DiscoverPlan {
        table: args.table.clone().unwrap_or_else(|| with_extension(&out, "csv")),
        manifest: args.manifest.clone().unwrap_or_else(|| with_extension(&out, "manifest.json")),
        dot: args.dot.clone(),
        config: args.config(),
        threads: args.threads,
        input,
        out,
    })
}

pub fn cmd_discover(args: &DiscoverArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let started = Instant::now();
    let plan = plan_discover(args)?;
    plan.config.validate().map_err(discovery_failure)?;
    let data = read_series_csv(&plan.input).map_err(|e| Failure::new(EXIT_MALFORMED, e.to_string()))?;
    let config = plan.config.clone();
    let graph = with_threads(plan.threads, || discover_network(&data, &config))?.map_err(discovery_failure)?;

    write_file(&plan.out, &serialize(&graph, Format::Json))?;
    write_file(&plan.table, &serialize(&graph, Format::EdgeListCsv))?;
    if let Some(dot) = &plan.dot {
        write_file(dot, &serialize(&graph, Format::Dot))?;
    }
    let manifest = RunManifest::new(
        plan.input.clone(),
        plan.config.clone(),
        manifest::Outputs {
            graph: plan.out.clone(),
            table: plan.table.clone(),
            dot: plan.dot.clone(),
        },
        plan.threads,
        started.elapsed().as_secs_f64(),
    );
    write_file(&plan.manifest, &manifest.to_json())?;
    let _ = writeln!(
        stdout,
        "{} edges over {} nodes -> {}",
        graph.edge_count(),
        graph.n_nodes(),
        plan.out.display()
    );
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = SyntheticConfig {
        n: args.n,
        t: args.t,
        rho: args.rho,
        p: args.p,
        seed: args.seed,
        self_loops: args.self_loops,
        noise_std: args.noise_std,
        burn_in: args.burn_in,
    };
    let inst = match args.generator {
        Generator::Linear => datasets::linear_stochastic_gaussian_process(&cfg),
        Generator::Poisson => datasets::poisson_count_process(&cfg),
    }
    .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let mut buf = Vec::new();
    write_series_csv(&inst.data, &mut buf).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    write_file(&args.out, &buf)?;
    write_file(&args.truth, &serialize(&inst.truth, Format::Json))?;
    let _ = writeln!(
        stdout,
        "{} x {} series -> {}; {} true edges -> {}",
        cfg.t,
        cfg.n,
        args.out.display(),
        inst.truth.edge_count(),
        args.truth.display()
    );
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let predicted = read_graph(&args.predicted)?;
    let truth = read_graph(&args.truth)?;
    let report = evaluate(&predicted, &truth, args.ignore_lags).map_err(|e| match e {
        GraphError::NodeCountMismatch { .. } => Failure::new(EXIT_INVALID, e.to_string()),
        other => Failure::new(EXIT_MALFORMED, other.to_string()),
    })?;
    let _ = writeln!(stdout, "{}", manifest::report_json(&report));
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut g = read_graph(&args.input)?;
    if let Some(min) = args.min_cmi {
        g = g.filtered(|e| e.cmi >= min);
    }
    write_file(&args.out, &serialize(&g, Format::Dot))?;
    let png = with_extension(&args.out, "png");
    let _ = writeln!(stdout, "dot -Tpng {} -o {}", args.out.display(), png.display());
    Ok(())
}

/// Parses `argv` and runs the chosen command. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Discover(a) => cmd_discover(a, stdout),
        Command::Synth(a) => cmd_synth(a, stdout),
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Plot(a) => cmd_plot(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
