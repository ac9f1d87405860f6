use std::path::PathBuf;
use std::process::ExitCode;

use catguard_cli::manifest::{Format, Overrides, RunManifest, SweepAxis};
use catguard_cli::{cmd_simulate, cmd_sweep, cmd_validate, CliError, Level, Suite, THREADS_ENV};
use clap::{Args, Parser, Subcommand};

/// Parity-probe preservation of a dissipating cavity cat state.
#[derive(Parser)]
#[command(name = "catguard", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo ensemble and write per-step results.
    Simulate(SimulateArgs),
    /// Run one ensemble per cell of a parameter grid.
    Sweep(SweepArgs),
    /// Run the oracle suite; exit 1 if any check fails.
    Validate {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// `name=v1,v2,...`; repeat for a Cartesian product.
    #[arg(long = "axis")]
    axes: Vec<SweepAxis>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate(args) => {
            let overrides = Overrides {
                trials: args.trials,
                seed: args.seed,
                format: args.format,
                axes: Vec::new(),
            };
            let manifest = RunManifest::load(&args.config, &args.out, overrides)?;
            let summary = cmd_simulate(&manifest)?;
            println!(
                "all-upper frequency {:.6} ± {:.6} (expected {:.6}) over {} trials -> {}",
                summary.all_upper_frequency,
                summary.all_upper_se,
                summary.all_upper_analytic,
                summary.trials,
                manifest.output_path.display()
            );
            Ok(0)
        }
        Command::Sweep(args) => {
            if args.axes.is_empty() {
                return Err(CliError::Usage("sweep needs at least one --axis name=v1,v2,...".into()));
            }
            let overrides = Overrides {
                trials: args.trials,
                seed: args.seed,
                format: args.format,
                axes: args.axes,
            };
            let manifest = RunManifest::load(&args.config, &args.out, overrides)?;
            let cells = cmd_sweep(&manifest)?;
            println!("{} cells -> {}", cells.len(), manifest.output_path.display());
            Ok(0)
        }
        Command::Validate { level } => Ok(cmd_validate(&Suite::new(level))?.exit_code()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
