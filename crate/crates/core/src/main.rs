use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use widomlab::harness::{run, ExperimentConfig, Kind};

/// Run a Widom-factor experiment from a JSON config.
#[derive(Parser, Debug)]
#[command(name = "widomlab", version)]
struct Cli {
    /// Experiment kind; must agree with `kind` in the config if present.
    kind: Kind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(failures) if failures == 0 => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} row(s) failed; see report.json");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<usize, Box<dyn std::error::Error>> {
    let bytes = std::fs::read(&cli.config).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&bytes)?;
    match cfg.kind {
        Some(k) if k != cli.kind => {
            return Err(format!("config kind `{}` does not match `{}`", k.name(), cli.kind.name()).into())
        }
        _ => cfg.kind = Some(cli.kind),
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    // the output location does not change results, so keep it out of the hash
    let dir = cli.out.or_else(|| cfg.out.take().map(PathBuf::from));
    cfg.out = None;
    let report = run(&cfg, dir.as_deref())?;
    for f in &report.run.files {
        println!("{f}");
    }
    Ok(report.run.failures.len())
}
