use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mdopf::experiments::{
    exponent_csv, grid, nominal_csv, run_exponent_sweep, run_nominal_comparison, run_vref_sweep,
    run_vuf_sweep, solve_model, summarize_vuf, vref_csv, vuf_csv, vuf_summary_csv, ModelKind,
    Solved,
};
use mdopf::feeder_io::{parse_feeder, solution_csv, FeederError, SolutionRef};
use mdopf::Network;

#[derive(Parser)]
#[command(name = "mdopf", version, about = "Linear multiphase power flow with delta loads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one model and write the per-bus / per-load solution.
    Solve {
        #[arg(long)]
        feeder: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare every model against its exact reference.
    Compare {
        #[arg(long)]
        feeder: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fill the `ms` column with wall-clock times.
        #[arg(long)]
        timing: bool,
    },
    /// Parameter sweeps.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[command(flatten)]
        args: SweepArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    #[value(name = "lp-d-e")]
    LpDE,
    #[value(name = "lp-d")]
    LpD,
    #[value(name = "ac-d-e")]
    AcDE,
    #[value(name = "ac-d")]
    AcD,
    #[value(name = "ac-w-e")]
    AcWE,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> ModelKind {
        match m {
            Model::LpDE => ModelKind::LpDE,
            Model::LpD => ModelKind::LpD,
            Model::AcDE => ModelKind::AcDE,
            Model::AcD => ModelKind::AcD,
            Model::AcWE => ModelKind::AcWE,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Exponent,
    Vuf,
    Vref,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    feeder: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    /// Comma-separated VUF targets in percent.
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<FeederError> for Failure {
    fn from(e: FeederError) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_summary{ext}"))
}

fn range(args: &SweepArgs, default: (f64, f64, f64)) -> Vec<f64> {
    grid(
        args.from.unwrap_or(default.0),
        args.to.unwrap_or(default.1),
        args.step.unwrap_or(default.2),
    )
}

fn run_solve(feeder: &Path, model: ModelKind, out: &Path) -> Result<(), Failure> {
    let net = parse_feeder(feeder)?;
    let solved = solve_model(&net, model).map_err(|e| Failure::Solver(e.to_string()))?;
    let text = match &solved {
        Solved::Linear(s) => solution_csv(&net, SolutionRef::Linear(s)),
        Solved::Phasor(s) => solution_csv(&net, SolutionRef::Phasor(s)),
    };
    write(out, &text)
}

fn run_compare(feeder: &Path, out: &Path, timing: bool) -> Result<(), Failure> {
    let net = parse_feeder(feeder)?;
    let records = run_nominal_comparison(&net, &ModelKind::ALL);
    for r in &records {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.model.name());
        }
    }
    write(out, &nominal_csv(&records, timing))
}

fn run_sweep(kind: SweepKind, args: &SweepArgs) -> Result<(), Failure> {
    let net: Network = parse_feeder(&args.feeder)?;
    match kind {
        SweepKind::Exponent => {
            let alphas = range(args, (0.0, 3.0, 0.25));
            write(&args.out, &exponent_csv(&run_exponent_sweep(&net, &alphas)))
        }
        SweepKind::Vuf => {
            let targets = args
                .targets
                .clone()
                .unwrap_or_else(|| (1..=10).map(f64::from).collect());
            let records = run_vuf_sweep(&net, &targets, args.samples, args.seed);
            write(&args.out, &vuf_csv(&records))?;
            write(&summary_path(&args.out), &vuf_summary_csv(&summarize_vuf(&records)))
        }
        SweepKind::Vref => {
            let factors = range(args, (1.0, 0.9, -0.025));
            write(&args.out, &vref_csv(&run_vref_sweep(&net, &factors)))
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() {
    let threads = std::env::var("MDOPF_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Solve { feeder, model, out } => run_solve(feeder, (*model).into(), out),
        Command::Compare {
            feeder,
            out,
            timing,
        } => run_compare(feeder, out, *timing),
        Command::Sweep { kind, args } => run_sweep(*kind, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
