//! Command-line driver: load a graph, run detection or a parameter sweep,
//! print graph statistics, or generate synthetic fixtures.
//!
//! Exit status is 0 on success, 1 when an input file cannot be read or
//! parsed, and 2 for invalid parameters.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use louvain::{
    build_graph, graph_stats, louvain as run_louvain, parallel_louvain, parse_edge_list, parse_matrix_market,
    report, write_edge_list, write_membership, BuildOptions, Config, Dendrogram, EdgeList, Graph, Mode,
    ParallelConfig, Report, SweepKind, SweepRow,
};

pub mod grid;

/// Environment variable consulted for the thread count when `--threads` is absent.
pub const THREADS_ENV: &str = "LOUVAIN_THREADS";

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "louvain-bench", version, about = "Louvain community detection runs and parameter sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect communities and write membership and per-pass report files.
    Detect(RunArgs),
    /// Run a parameter sweep and emit one row per grid cell.
    Sweep {
        #[arg(value_enum)]
        kind: SweepArg,
        /// Comma-separated values or a geometric range `start:stop:factor`.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print vertex, edge and average-degree counts after preprocessing.
    Stats(InputArgs),
    /// Write a synthetic edge-list fixture.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Tolerance,
    Decline,
    Threads,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Mtx,
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Async,
    Sync,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to `mtx` for `.mtx` files and `edgelist` otherwise.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Add a self-loop of weight W (default 1) to every vertex lacking one.
    #[arg(long, value_name = "W", num_args = 0..=1, default_missing_value = "1", require_equals = true)]
    pub add_self_loops: Option<f64>,
    /// Take the input arcs as given instead of adding reverse edges.
    #[arg(long)]
    pub no_symmetrize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "async")]
    pub mode: ModeArg,
    /// Use the multi-threaded engine with N workers.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    pub chunk_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 10.0)]
    pub decline_factor: f64,
    #[arg(long, default_value_t = 0.0)]
    pub pass_tolerance: f64,
    #[arg(long, default_value_t = 20)]
    pub max_passes: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    #[arg(long)]
    pub out_membership: Option<PathBuf>,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub report_format: ReportFormat,
    /// Recorded for reproducibility; detection itself draws no random numbers.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Cliques,
    RingOfCliques,
    Random,
    Planted,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: FixtureKind,
    /// Clique size.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Number of cliques.
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Bridges between consecutive cliques (cliques only).
    #[arg(long, default_value_t = 0)]
    pub bridges: usize,
    /// Vertex count (random only).
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Edge probability (random only).
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Block count (planted only).
    #[arg(long, default_value_t = 10)]
    pub groups: usize,
    /// Block size (planted only).
    #[arg(long, default_value_t = 50)]
    pub size: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_out: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Error carrying the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn params(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_PARAMS,
            message: message.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first) and runs the command; returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Detect(run) => cmd_detect(run, stdout),
        Command::Sweep { kind, grid, run } => cmd_sweep(*kind, grid.as_deref(), run, stdout),
        Command::Stats(input) => cmd_stats(input, stdout),
        Command::Gen(gen) => cmd_gen(gen),
    }
}

/// Which engine a run resolves to after flags and environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Sequential(Config),
    Parallel(ParallelConfig),
}

impl Engine {
    fn run(&self, g: &Graph) -> CliResult<(Dendrogram, Report)> {
        let result = match self {
            Engine::Sequential(cfg) => run_louvain(g, cfg),
            Engine::Parallel(cfg) => parallel_louvain(g, cfg),
        };
        result.map_err(|e| match e {
            louvain::Error::Config(_) => CliError::params(e),
            _ => CliError::input(e),
        })
    }

    fn config(&self) -> Config {
        match self {
            Engine::Sequential(cfg) => *cfg,
            Engine::Parallel(cfg) => cfg.base,
        }
    }
}

fn env_threads() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::params(format!("{THREADS_ENV} must be a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Validates flags and picks the engine.
pub fn resolve_engine(run: &RunArgs) -> CliResult<Engine> {
    let mode = match run.mode {
        ModeArg::Async => Mode::Async,
        ModeArg::Sync => Mode::Sync,
    };
    let cfg = Config {
        tolerance_initial: run.tolerance,
        tolerance_decline_factor: run.decline_factor,
        pass_tolerance: run.pass_tolerance,
        max_passes: run.max_passes,
        max_iterations_per_pass: run.max_iterations,
        mode,
    };
    cfg.validate().map_err(CliError::params)?;
    let threads = match run.threads {
        Some(t) => Some(t),
        None => env_threads()?,
    };
    match threads {
        None => Ok(Engine::Sequential(cfg)),
        Some(threads) => {
            if mode == Mode::Sync {
                return Err(CliError::params("the multi-threaded engine is asynchronous; drop --mode sync or --threads"));
            }
            let pcfg = ParallelConfig {
                base: cfg,
                threads,
                chunk_size: run.chunk_size,
            };
            pcfg.validate().map_err(CliError::params)?;
            Ok(Engine::Parallel(pcfg))
        }
    }
}

/// Reads and preprocesses the input graph.
pub fn load_graph(input: &InputArgs) -> CliResult<Graph> {
    if let Some(w) = input.add_self_loops {
        if !(w.is_finite() && w > 0.0) {
            return Err(CliError::params("self-loop weight must be positive and finite"));
        }
    }
    let format = input.format.unwrap_or_else(|| {
        match input.input.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => InputFormat::Mtx,
            _ => InputFormat::Edgelist,
        }
    });
    let file = File::open(&input.input)
        .map_err(|e| CliError::input(format!("{}: {e}", input.input.display())))?;
    let reader = BufReader::new(file);
    let edges: EdgeList = match format {
        InputFormat::Mtx => parse_matrix_market(reader),
        InputFormat::Edgelist => parse_edge_list(reader),
    }
    .map_err(|e| CliError::input(format!("{}: {e}", input.input.display())))?;
    let opts = BuildOptions {
        symmetrize: !input.no_symmetrize,
        add_self_loops: input.add_self_loops.is_some(),
        default_weight: input.add_self_loops.unwrap_or(1.0),
    };
    build_graph(&edges, opts).map_err(|e| CliError::input(format!("{}: {e}", input.input.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::params(format!("cannot write {}: {e}", path.display())))
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::input(e)
}

pub fn cmd_detect(run: &RunArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let engine = resolve_engine(run)?;
    let g = load_graph(&run.input)?;
    let (dendrogram, report) = engine.run(&g)?;
    let membership = dendrogram.flatten().map_err(io_err)?.normalize().0;

    if let Some(path) = &run.out_membership {
        write_membership(&membership, create(path)?).map_err(io_err)?;
    }
    if let Some(path) = &run.out_report {
        let out = create(path)?;
        match run.report_format {
            ReportFormat::Csv => report::write_report_csv(&report, out),
            ReportFormat::Json => report::write_report_json(&report, out),
        }
        .map_err(io_err)?;
    }
    writeln!(
        stdout,
        "Q={:.4} communities={} passes={} iterations={} wall_ms={:.3}",
        report.final_q, report.communities, report.total_passes, report.total_iterations, report.wall_ms
    )
    .map_err(io_err)
}

/// Default grids, used when `--grid` is absent.
pub fn default_grid(kind: SweepArg) -> &'static str {
    match kind {
        SweepArg::Tolerance => "1:1e-12:10",
        SweepArg::Decline => "10:1e4:10",
        SweepArg::Threads => "2,4,8,12,16,24,32,48",
    }
}

pub fn cmd_sweep(kind: SweepArg, grid: Option<&str>, run: &RunArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let values = grid::parse_grid(grid.unwrap_or(default_grid(kind))).map_err(CliError::params)?;
    let engine = resolve_engine(run)?;
    let mut cells: Vec<(SweepKind, Engine)> = Vec::with_capacity(values.len());
    for v in values {
        let mut cfg = engine.config();
        let cell = match kind {
            SweepArg::Tolerance => {
                cfg.tolerance_initial = v;
                (SweepKind::Tolerance, with_config(engine, cfg))
            }
            SweepArg::Decline => {
                cfg.tolerance_decline_factor = v;
                (SweepKind::Decline, with_config(engine, cfg))
            }
            SweepArg::Threads => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(CliError::params(format!("thread count {v} is not a positive integer")));
                }
                if cfg.mode == Mode::Sync {
                    return Err(CliError::params("thread sweeps use the asynchronous engine; drop --mode sync"));
                }
                let chunk_size = match engine {
                    Engine::Parallel(p) => p.chunk_size,
                    Engine::Sequential(_) => run.chunk_size,
                };
                (
                    SweepKind::Threads,
                    Engine::Parallel(ParallelConfig {
                        base: cfg,
                        threads: v as usize,
                        chunk_size,
                    }),
                )
            }
        };
        match cell.1 {
            Engine::Sequential(c) => c.validate(),
            Engine::Parallel(p) => p.validate(),
        }
        .map_err(CliError::params)?;
        cells.push(cell);
    }

    let g = load_graph(&run.input)?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(cells.len());
    for (kind, engine) in cells {
        let (_, report) = engine.run(&g)?;
        rows.push(SweepRow::from_report(kind, &engine.config(), &report));
    }

    match &run.out_report {
        Some(path) => {
            let out = create(path)?;
            match run.report_format {
                ReportFormat::Csv => report::write_sweep_csv(&rows, out),
                ReportFormat::Json => report::write_sweep_json(&rows, out),
            }
            .map_err(io_err)?;
            writeln!(stdout, "rows={}", rows.len()).map_err(io_err)
        }
        None => match run.report_format {
            ReportFormat::Csv => report::write_sweep_csv(&rows, stdout),
            ReportFormat::Json => report::write_sweep_json(&rows, stdout),
        }
        .map_err(io_err),
    }
}

fn with_config(engine: Engine, cfg: Config) -> Engine {
    match engine {
        Engine::Sequential(_) => Engine::Sequential(cfg),
        Engine::Parallel(p) => Engine::Parallel(ParallelConfig { base: cfg, ..p }),
    }
}

pub fn cmd_stats(input: &InputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let g = load_graph(input)?;
    writeln!(stdout, "{}", graph_stats(&g)).map_err(io_err)
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    use louvain::fixtures;
    let prob = |p: f64, name: &str| {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(CliError::params(format!("{name} must lie in [0, 1]")))
        }
    };
    let edges = match args.kind {
        FixtureKind::Cliques | FixtureKind::RingOfCliques => {
            if args.k < 1 || args.count < 1 {
                return Err(CliError::params("--k and --count must be >= 1"));
            }
            if args.kind == FixtureKind::Cliques {
                fixtures::cliques(args.k, args.count, args.bridges)
            } else {
                fixtures::ring_of_cliques(args.k, args.count)
            }
        }
        FixtureKind::Random => {
            if args.n < 1 {
                return Err(CliError::params("--n must be >= 1"));
            }
            prob(args.p, "--p")?;
            fixtures::random(args.n, args.p, args.seed)
        }
        FixtureKind::Planted => {
            if args.groups < 1 || args.size < 1 {
                return Err(CliError::params("--groups and --size must be >= 1"));
            }
            prob(args.p_in, "--p-in")?;
            prob(args.p_out, "--p-out")?;
            fixtures::planted_partition(args.groups, args.size, args.p_in, args.p_out, args.seed)
        }
    };
    write_edge_list(&edges, create(&args.out)?).map_err(io_err)
}
