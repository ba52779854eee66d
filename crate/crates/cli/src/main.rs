use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod plot;
mod run;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "sepnet", version, about = "Separated nets, radial rescales and displacement bounds")]
struct Cli {
    /// JSON file with the same keys as the long flags (snake_case); flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a net and write it with its certificate.
    Generate(ExperimentConfig),
    /// Displacement curves: exact, counting lower bound, bottleneck optimum, analytic bound.
    Displacement(ExperimentConfig),
    /// Run the oracle suite.
    Verify(ExperimentConfig),
    /// Natural density and counting-measure discrepancy.
    Density(ExperimentConfig),
}

fn load(path: Option<&PathBuf>) -> sepnet_core::Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match load(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Generate(c) => commands::generate(&c.over(base)),
        Command::Displacement(c) => commands::displacement(&c.over(base)),
        Command::Verify(c) => commands::verify(&c.over(base)),
        Command::Density(c) => commands::density(&c.over(base)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
