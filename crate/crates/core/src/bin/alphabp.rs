use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alphabp::engine::{EngineConfig, Schedule};
use alphabp::experiment::{
    infer_report, run_experiment, ConfigPatch, ExperimentKind, MismatchMetric, PriorMode, ScheduleKind,
};
use alphabp::format::parse_graph;
use alphabp::models::snr_db;

#[derive(Parser)]
#[command(name = "alphabp", version, about = "Alpha belief propagation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mismatch between exact MAP and alpha-BP on random Ising models
    IsingMismatch(SweepArgs),
    /// Symbol-error rate of MIMO detectors
    MimoSer(SweepArgs),
    /// Run alpha-BP on a graph file and print marginals and decisions
    Infer(InferArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Receive antennas (MIMO only, defaults to n)
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Edge probabilities or noise standard deviations
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long, value_enum)]
    schedule: Option<ScheduleArg>,
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long, value_enum)]
    prior: Option<PriorArg>,
    #[arg(long, value_enum)]
    mismatch: Option<MismatchArg>,
    /// sigma | sigma_squared
    #[arg(long)]
    covariance_scaling: Option<String>,
    /// CSV destination; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScheduleArg {
    Fixed,
    Random,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PriorArg {
    None,
    Mmse,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MismatchArg {
    Hamming,
    Vector,
}

#[derive(Args)]
struct InferArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = alphabp::engine::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = alphabp::engine::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    /// Shuffle factor order each sweep with this seed
    #[arg(long)]
    random_order: Option<u64>,
}

impl SweepArgs {
    fn patch(&self) -> ConfigPatch {
        ConfigPatch {
            experiment: None,
            n: self.n,
            m: self.m,
            trials: self.trials,
            sweep: self.sweep.clone(),
            alphas: self.alphas.clone(),
            seed: self.seed,
            tol: self.tol,
            max_sweeps: self.max_sweeps,
            schedule: self.schedule.map(|s| match s {
                ScheduleArg::Fixed => ScheduleKind::Fixed,
                ScheduleArg::Random => ScheduleKind::Random,
            }),
            damping: self.damping,
            prior: self.prior.map(|p| match p {
                PriorArg::None => PriorMode::None,
                PriorArg::Mmse => PriorMode::Mmse,
            }),
            mismatch: self.mismatch.map(|m| match m {
                MismatchArg::Hamming => MismatchMetric::Hamming,
                MismatchArg::Vector => MismatchMetric::Vector,
            }),
            covariance_scaling: self.covariance_scaling.clone(),
            out: self.out.clone(),
        }
    }
}

fn sweep(kind: ExperimentKind, args: &SweepArgs) -> Result<(), String> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ConfigPatch::from_json(&text).map_err(|e| e.to_string())?
        }
        None => ConfigPatch::default(),
    };
    let config = base.merge(args.patch()).resolve(Some(kind)).map_err(|e| e.to_string())?;
    let table = run_experiment(&config).map_err(|e| e.to_string())?;
    let csv = table.to_csv();
    match &config.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{csv}"),
    }
    if kind == ExperimentKind::MimoSer {
        for &sigma in &config.sweep {
            eprintln!("sigma_w {sigma}: SNR {:.2} dB", snr_db(config.n_vars, sigma));
        }
    }
    Ok(())
}

fn infer(args: &InferArgs) -> Result<bool, String> {
    let text = std::fs::read_to_string(&args.graph).map_err(|e| format!("{}: {e}", args.graph.display()))?;
    let graph = parse_graph(&text).map_err(|e| e.to_string())?;
    let config = EngineConfig {
        alpha: args.alpha,
        tolerance: args.tol,
        max_sweeps: args.max_sweeps,
        damping: args.damping,
        schedule: match args.random_order {
            Some(seed) => Schedule::SeededRandom { seed },
            None => Schedule::FixedOrder,
        },
        ..EngineConfig::default()
    };
    let (report_text, report) = infer_report(&graph, &config).map_err(|e| e.to_string())?;
    print!("{report_text}");
    Ok(report.converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::IsingMismatch(a) => sweep(ExperimentKind::IsingMismatch, a).map(|_| true),
        Command::MimoSer(a) => sweep(ExperimentKind::MimoSer, a).map(|_| true),
        Command::Infer(a) => infer(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
