//! Batch experiment runner for the revsurf library.
//!
//! Verbs:
//!   revsurf run <config.json>        run one experiment; artifacts go to the
//!                                    config's output dir (or $REVSURF_OUTPUT_ROOT/<dir>)
//!   revsurf validate <config.json>   check the config without running
//!   revsurf list-experiments         print the experiment catalogue
//!
//! Exit codes: 0 = all in-config assertions pass, 1 = an assertion failed
//! (failures.json written next to results.json), 2 = invalid config/usage.

mod config;
mod experiments;
mod output;

use config::{validate, Experiment, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") if args.len() == 2 => run_cmd(&args[1], true),
        Some("validate") if args.len() == 2 => run_cmd(&args[1], false),
        Some("list-experiments") => {
            for (_, desc) in Experiment::all() {
                println!("{desc}");
            }
            ExitCode::SUCCESS
        }
        _ => {
            eprintln!("usage: revsurf run <config.json> | validate <config.json> | list-experiments");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &str) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))?;
    validate(&cfg).map_err(|errs| {
        format!(
            "config {path} violates parameter ranges:\n  - {}",
            errs.join("\n  - ")
        )
    })?;
    Ok(cfg)
}

fn run_cmd(path: &str, execute: bool) -> ExitCode {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    if !execute {
        println!("config ok: {} -> {}", cfg.experiment.name(), cfg.output.dir.display());
        return ExitCode::SUCCESS;
    }
    let out_dir: PathBuf = match std::env::var_os("REVSURF_OUTPUT_ROOT") {
        Some(root) => PathBuf::from(root).join(&cfg.output.dir),
        None => cfg.output.dir.clone(),
    };
    let result = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("experiment failed: {e:#}");
            return ExitCode::from(2);
        }
    };
    let params = serde_json::to_value(&cfg.parameters).expect("parameters serialize");
    if let Err(e) = result.write(
        &out_dir,
        cfg.experiment.name(),
        &params,
        cfg.seed,
        &cfg.output.formats,
    ) {
        eprintln!("cannot write artifacts to {}: {e}", out_dir.display());
        return ExitCode::from(2);
    }
    for a in &result.assertions {
        println!(
            "[{}] {}: {}",
            if a.pass { "pass" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    println!(
        "{}: {} assertions, artifacts in {}",
        cfg.experiment.name(),
        result.assertions.len(),
        out_dir.display()
    );
    if result.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
