use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fh_levy_cli::{CliError, Command, Overrides, RunConfig};

/// Rational term-structure models driven by geometric Lévy martingales.
#[derive(Parser)]
#[command(name = "fhlevy", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate driver, bond-price and short-rate paths (CSV)
    Simulate(Common),
    /// Bond prices, rates, risk premia and option prices (JSON)
    Price(WithMc),
    /// Call prices over an expiry by strike grid (CSV)
    Surface(WithMc),
    /// Run the invariant suite; exits with 3 if any check fails
    Validate(Common),
    /// Time analytic call prices per model
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Seed for every random stream (overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo paths (simulated paths for `simulate`)
    #[arg(long)]
    paths: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct WithMc {
    #[command(flatten)]
    common: Common,
    /// Add Monte Carlo estimates and standard errors
    #[arg(long)]
    mc: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, mc) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c, false),
        Cmd::Price(w) => (Command::Price, w.common, w.mc),
        Cmd::Surface(w) => (Command::Surface, w.common, w.mc),
        Cmd::Validate(c) => (Command::Validate, c, false),
        Cmd::Bench(c) => (Command::Bench, c, false),
    };
    match execute(command, &common, mc) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fhlevy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command, common: &Common, mc: bool) -> Result<u8, CliError> {
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let config = RunConfig::load(&common.config)?;
    let overrides = Overrides {
        seed: common.seed,
        paths: common.paths,
        mc,
    };
    let outcome = fh_levy_cli::run(command, config, &overrides)?;
    match &common.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{}", outcome.text),
    }
    if outcome.failures.is_empty() {
        return Ok(0);
    }
    for f in &outcome.failures {
        eprintln!("fhlevy: {f}");
    }
    Err(CliError::Validation(format!("{} check(s) failed", outcome.failures.len())))
}
