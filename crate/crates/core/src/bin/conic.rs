//! `conic run | validate | oracle`. Exit 0 on success, 2 on a config error,
//! 3 on a numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conic_spectral::config::ExperimentConfig;
use conic_spectral::runner::{self, RunError};

/// Overrides `output.directory` from the config.
const OUTPUT_DIR_ENV: &str = "CONIC_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "conic", version, about = "Spectral experiments on metric cones")]
struct Cli {
    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its artifacts.
    Run { config: PathBuf },
    /// Check a config without computing anything.
    Validate { config: PathBuf },
    /// Print reference numbers from closed forms.
    Oracle {
        /// One of the oracle names; `list` prints them.
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, RunError> {
    Ok(ExperimentConfig::from_file(path)?)
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let out = std::env::var_os(OUTPUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| cfg.output_dir());
            let summary = runner::run(&cfg, &out)?;
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("ok: {}", cfg.kind);
        }
        Command::Oracle { name } if name == "list" => {
            for n in runner::ORACLES {
                println!("{n}");
            }
        }
        Command::Oracle { name } => print!("{}", runner::oracle(&name)?),
    }
    Ok(())
}
