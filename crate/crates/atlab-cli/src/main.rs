//! `atlab`: batch front end for the Ashkin-Teller toolkit.

mod commands;
mod config;
mod output;
mod svg;

use std::process::ExitCode;
use std::time::Instant;

use atlab::Error;
use clap::{Parser, Subcommand};
use serde_json::json;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "atlab", version, about = "Ashkin-Teller oracle, sampler and scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact identity and inequality checks on a small region.
    Verify(ExperimentConfig),
    /// Dump an enumerated law (at, gat, atrc, eightv, hf).
    Enumerate(ExperimentConfig),
    /// Run Markov chains and summarise observables.
    Sample(ExperimentConfig),
    /// θ_k along γ_{κ,κ'} or edge densities along ĝ_κ.
    ScanCurve(ExperimentConfig),
    /// Staggered order and τ_0 over a (J, U) grid.
    PhaseMap(ExperimentConfig),
    /// Var(h_0) of the six-vertex height function against n.
    HeightVar(ExperimentConfig),
}

const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_CAP: u8 = 4;

fn error_exit(e: &Error) -> ExitCode {
    let (kind, code) = match e {
        Error::CapExceeded(_) => ("cap_exceeded", EXIT_CAP),
        Error::Region(_) => ("region", EXIT_CONFIG),
        Error::Boundary(_) => ("boundary", EXIT_CONFIG),
        Error::Parameters(_) | Error::DegenerateBranch => ("parameters", EXIT_CONFIG),
        Error::Input(_) => ("input", EXIT_CONFIG),
    };
    let doc = json!({ "error": { "kind": kind, "message": e.to_string() }, "exit_code": code });
    eprintln!("{doc}");
    ExitCode::from(code)
}

fn run(name: &str, flags: &ExperimentConfig) -> Result<bool, Error> {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::load(flags)?;
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(Error::Parameters("--threads must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let outcome = match name {
        "verify" => commands::verify(&mut cfg),
        "enumerate" => commands::enumerate(&mut cfg),
        "sample" => commands::sample(&mut cfg),
        "scan-curve" => commands::scan_curve(&mut cfg),
        "phase-map" => commands::phase_map(&mut cfg),
        _ => commands::height_var(&mut cfg),
    }?;
    let seconds = cfg.timing.unwrap_or(false).then(|| start.elapsed().as_secs_f64());
    let doc = output::json_document(name, &cfg, &outcome.report, seconds)?;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Input(e.to_string()))?;
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
        output::write_text(&dir.join("results.json"), &(text.clone() + "\n"))?;
        output::write_csv(&dir.join("results.csv"), &outcome.report, cfg.seed())?;
        if let (Some(true), Some(plot)) = (cfg.svg, &outcome.svg) {
            output::write_text(&dir.join("plot.svg"), plot)?;
        }
    }
    println!("{text}");
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = match &cli.command {
        Command::Verify(c) => ("verify", c),
        Command::Enumerate(c) => ("enumerate", c),
        Command::Sample(c) => ("sample", c),
        Command::ScanCurve(c) => ("scan-curve", c),
        Command::PhaseMap(c) => ("phase-map", c),
        Command::HeightVar(c) => ("height-var", c),
    };
    match run(name, flags) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(e) => error_exit(&e),
    }
}
