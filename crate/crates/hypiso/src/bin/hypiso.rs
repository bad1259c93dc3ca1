//! Command-line front end. Exit codes: 0 all applicable verdicts pass,
//! 1 a verdict fails (or the optimizer did not converge), 2 numerical or
//! configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hypiso::report::{run_command, RunConfig};
use hypiso::verify::MobiusTarget;

#[derive(Parser)]
#[command(
    name = "hypiso",
    version,
    about = "Isoperimetric checks for minimal submanifolds of the Poincaré ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation radius in (0, 1]; 1 integrates the charts directly.
    #[arg(long, global = true)]
    truncation: Option<f64>,
    /// Optimizer restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Submanifold,
    Boundary,
}

#[derive(Subcommand)]
enum Command {
    /// Geodesic caps over an angle grid: volumes and the linear, classical and reverse verdicts.
    SweepTheta,
    /// Monotonicity ratio of the configured family.
    Monotonicity,
    /// Möbius volume of the configured family or its ideal boundary.
    Mobius {
        #[arg(long, value_enum)]
        target: Option<Target>,
        /// Also write the optimizer history as CSV.
        #[arg(long)]
        history: bool,
    },
    /// Every applicable verdict for the configured family.
    VerifyAll,
}

fn configure(cli: &Cli) -> hypiso::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(t) = cli.truncation {
        config.measure.truncation = t;
    }
    if let Some(r) = cli.restarts {
        config.optimizer.restarts = r;
    }
    if let Command::Mobius { target, history } = &cli.command {
        if let Some(t) = target {
            config.mobius_target = match t {
                Target::Submanifold => MobiusTarget::Submanifold,
                Target::Boundary => MobiusTarget::IdealBoundary,
            };
        }
        config.history_csv |= *history;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("HYPISO_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    let name = match cli.command {
        Command::SweepTheta => "sweep-theta",
        Command::Monotonicity => "monotonicity",
        Command::Mobius { .. } => "mobius",
        Command::VerifyAll => "verify-all",
    };
    let result = configure(&cli).and_then(|config| run_command(name, &config));
    match result {
        Ok(written) => {
            for f in &written.files {
                println!("{}", f.display());
            }
            ExitCode::from(written.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("hypiso: {e}");
            ExitCode::from(2)
        }
    }
}
