//! Command-line front end: instance files, instance generation, solving,
//! oracles and graph dumps.

pub mod generate;
pub mod io;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use transit_cg::graph::build_graph;
use transit_cg::model::Instance;
use transit_cg::oracle::{solve_arcflow_lp, solve_bruteforce_ip, OracleError};
use transit_cg::solver::{price_and_branch, run_column_generation, BranchStatus, CgConfig, CgStatus, PricerKind, SolveError};

use crate::generate::{generate_instances, GenerateError, GeneratorSpec};
use crate::io::{load_instance, InputError, DEMAND, PARAMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "transit-cg", version, about = "Capacitated passenger routing by column generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the LP relaxation by column generation, optionally followed by the integer stage.
    Solve(SolveArgs),
    /// Write sub-sampled instances with scaled capacities.
    Generate(GenerateArgs),
    /// Solve with an independent reference method and print the objective.
    Oracle(OracleArgs),
    /// Print the time-expanded graph as CSV.
    GraphDump(GraphDumpArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Directory holding stops.csv, routes.csv, stop_times.csv and optionally distances.csv.
    #[arg(long)]
    pub network: PathBuf,
    /// Demand CSV; defaults to demand.csv inside the network directory.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Parameter file; defaults to params.txt inside the network directory.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

impl InstanceArgs {
    pub fn load(&self) -> Result<Instance, InputError> {
        let demand = self.demand.clone().unwrap_or_else(|| self.network.join(DEMAND));
        let params = self.params.clone().unwrap_or_else(|| self.network.join(PARAMS));
        load_instance(&self.network, &demand, &params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PricerArg {
    Astar,
    Dijkstra,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "on")]
    pub filter: Switch,
    #[arg(long, value_enum, default_value = "astar")]
    pub pricer: PricerArg,
    /// Run price-and-branch on the final column pool.
    #[arg(long)]
    pub integer: bool,
    /// Output directory for solution.json, report.json and report.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pricing worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_name = "SECS")]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Arcflow,
    Bruteforce,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "arcflow")]
    pub mode: OracleMode,
    /// Per-passenger path enumeration limit for brute force.
    #[arg(long, default_value_t = 10_000)]
    pub path_limit: usize,
}

#[derive(Debug, Args)]
pub struct GraphDumpArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{0}")]
    Usage(String),
    /// A limit stopped the run; `summary` is still printed on standard output.
    #[error("{reason}")]
    Limit { summary: String, reason: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) | CliError::Generate(GenerateError::Fraction(_) | GenerateError::Empty { .. }) => EXIT_INPUT,
            CliError::Limit { .. } => EXIT_LIMIT,
            CliError::Oracle(OracleError::TooLarge { .. } | OracleError::TooManyCombinations { .. } | OracleError::Truncated { .. }) => {
                EXIT_LIMIT
            }
            _ => EXIT_INTERNAL,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

/// Runs one command, returning what it prints on standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Generate(args) => {
            let spec = GeneratorSpec { base: args.instance.load()?, fraction: args.fraction, seed: args.seed, count: args.count };
            let dirs = generate_instances(&spec, &args.out)?;
            Ok(dirs.iter().map(|d| format!("{}\n", d.display())).collect())
        }
        Command::Oracle(args) => {
            let inst = args.instance.load()?;
            let g = build_graph(&inst);
            let value = match args.mode {
                OracleMode::Arcflow => solve_arcflow_lp(&g, &inst)?.objective,
                OracleMode::Bruteforce => solve_bruteforce_ip(&g, &inst, args.path_limit)?.cost,
            };
            Ok(format!("{}\n", output::clean(value)))
        }
        Command::GraphDump(args) => {
            let csv = build_graph(&args.instance.load()?).to_csv();
            match &args.out {
                Some(path) => {
                    write_file(path, &csv)?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
    }
}

/// Solves and writes artifacts. Artifacts are written before a limit is
/// reported, so a limit exit still leaves the partial result behind.
pub fn run_solve(args: &SolveArgs) -> Result<String, CliError> {
    if let Some(t) = args.time_limit {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--time-limit must be a non-negative number of seconds, got {t}")));
        }
    }
    let inst = args.instance.load()?;
    let cfg = CgConfig {
        use_filter: args.filter == Switch::On,
        pricer: match args.pricer {
            PricerArg::Astar => PricerKind::AStar,
            PricerArg::Dijkstra => PricerKind::Dijkstra,
        },
        time_limit: args.time_limit.map(Duration::from_secs_f64),
        seed: args.seed,
        threads: args.threads,
        ..Default::default()
    };
    let g = build_graph(&inst);
    let (ms, report) = run_column_generation(&g, &inst, &cfg)?;
    let integer = if args.integer { Some(price_and_branch(&ms, &g, &inst, &cfg)?) } else { None };

    let solution = output::solution_json(&ms, &g, &inst, &report, integer.as_ref());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;
        write_file(&dir.join("solution.json"), &output::to_sorted_json(&solution))?;
        write_file(&dir.join("report.json"), &output::to_sorted_json(&output::report_json(&report, integer.as_ref())))?;
        write_file(&dir.join("report.csv"), &report.to_csv())?;
    }
    let summary = output::summary(&report, integer.as_ref(), ms.columns().len());

    if report.status != CgStatus::Optimal {
        let reason = format!("column generation stopped early: {:?}", report.status);
        return Err(CliError::Limit { summary, reason });
    }
    if let Some(ip) = &integer {
        if ip.status != BranchStatus::Optimal {
            let reason = format!("integer stage stopped early: {:?}", ip.status);
            return Err(CliError::Limit { summary, reason });
        }
    }
    Ok(summary)
}
