use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sn_interference::campaign;
use sn_interference::config::RunConfig;
use sn_interference::Error;

/// Schrödinger–Newton double-slit simulator.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// `key = value` configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["single", "sweep", "compare", "feasibility"])]
    mode: Option<String>,
    /// Dimensionless mass for single and compare runs.
    #[arg(long)]
    mass: Option<f64>,
    /// Comma-separated masses for a sweep.
    #[arg(long)]
    masses: Option<String>,
    #[arg(long, value_parser = ["on", "off"])]
    gravity: Option<String>,
    #[arg(long, value_parser = ["frozen", "pc"])]
    scheme: Option<String>,
    #[arg(long)]
    t_eval: Option<f64>,
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Parallel sweep workers (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Add the potential column to gravity snapshots.
    #[arg(long)]
    emit_potential: bool,
    /// Write plot.py next to the CSV output.
    #[arg(long)]
    emit_plot_script: bool,
    /// Any other configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    };
    push("mode", cli.mode.clone());
    push("mass", cli.mass.map(|v| v.to_string()));
    push("masses", cli.masses.clone());
    push("gravity", cli.gravity.clone());
    push("scheme", cli.scheme.clone());
    push("t_eval", cli.t_eval.map(|v| v.to_string()));
    push("outdir", cli.outdir.as_ref().map(|p| p.display().to_string()));
    push("jobs", cli.jobs.map(|v| v.to_string()));
    push("emit_potential", cli.emit_potential.then(|| "on".to_string()));
    push("emit_plot_script", cli.emit_plot_script.then(|| "on".to_string()));

    let mut errors = Vec::new();
    for kv in &cli.set {
        match kv.split_once('=') {
            Some((k, v)) => overrides.push((k.to_string(), v.to_string())),
            None => errors.push(format!("--set expects KEY=VALUE, got '{kv}'")),
        }
    }
    for (k, v) in overrides {
        if let Err(e) = cfg.set(&k, &v) {
            errors.push(format!("--{k}: {e}"));
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errors))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(&cli).and_then(|cfg| campaign::run(&cfg)) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
