use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oamlink_cli::pipeline::Pipeline;
use oamlink_cli::scenario::{Scenario, ScenarioFile};
use oamlink_cli::StageError;

/// Multi-mode OAM convergent-link simulator.
#[derive(Parser)]
#[command(name = "oamlink", version, about)]
struct Cli {
    /// Scenario configuration file (TOML sections); defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the random seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the BER SNR grid, "start:stop:step" in dB.
    #[arg(long = "snr-grid", global = true)]
    snr_grid: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Array geometry and lens phase/thickness artifacts.
    Design,
    /// Longitudinal scans and focal-plane field dumps per mode.
    Propagate {
        /// Propagate without the lens phase screen (baseline).
        #[arg(long = "no-lens")]
        no_lens: bool,
    },
    /// Simulated coupling/isolation table with per-mode lens gain.
    Isolation,
    /// Monte-Carlo 16-QAM BER curves.
    Ber {
        /// Replace the simulated coupling with an ideal diagonal channel.
        #[arg(long = "diagonal-h")]
        diagonal_h: bool,
    },
    /// The full pipeline: design, propagate (both lens states),
    /// isolation, ber.
    All,
}

fn load_scenario(cli: &Cli) -> Result<Scenario, StageError> {
    let mut scenario = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| StageError::Io(format!("{}: {e}", path.display())))?;
            Scenario::parse_toml(&text)?
        }
        None => Scenario::from_file(ScenarioFile::default())?,
    };
    if let Some(seed) = cli.seed {
        scenario.run.seed = seed;
    }
    if let Some(grid) = &cli.snr_grid {
        oamlink_cli::scenario::parse_snr_grid(grid)?;
        scenario.run.snr_grid = grid.clone();
    }
    Ok(scenario)
}

fn run(cli: &Cli) -> Result<(), StageError> {
    let scenario = load_scenario(cli)?;
    let mut pipeline = Pipeline::new(scenario, &cli.out)?;
    match cli.command {
        Command::Design => pipeline.run_design()?,
        Command::Propagate { no_lens } => pipeline.run_propagate(!no_lens)?,
        Command::Isolation => pipeline.run_isolation()?,
        Command::Ber { diagonal_h } => pipeline.run_ber(diagonal_h)?,
        Command::All => {
            pipeline.run_design()?;
            pipeline.run_propagate(true)?;
            pipeline.run_propagate(false)?;
            pipeline.run_isolation()?;
            pipeline.run_ber(false)?;
        }
    }
    pipeline.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oamlink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
