//! Drives the experiment runner from a config file, the same path the
//! `conic` binary takes. Usage: `cargo run --example run_config -- <cfg> [out]`.

use std::path::PathBuf;

use conic_spectral::config::ExperimentConfig;
use conic_spectral::runner;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "examples/configs/indexsets.cfg".into()));
    let cfg = match ExperimentConfig::from_file(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| cfg.output_dir());
    match runner::run(&cfg, &out) {
        Ok(summary) => summary.lines.iter().for_each(|l| println!("{l}")),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
