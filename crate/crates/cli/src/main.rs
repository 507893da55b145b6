use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsl_core::experiments::{self, Experiment, ExperimentConfig};
use qsl_core::Error;

/// Quantum speed limit experiments as CSV datasets.
#[derive(Parser)]
#[command(name = "qsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-qubit dephasing: exact distance against the bound.
    Figure1(Common),
    /// Separable states: minimal time against the number of qubits.
    Figure2(Common),
    /// Long-time limit of the single-qubit bound over r.
    Exclusion(Common),
    /// GHZ bound, its 1/N asymptote and the exact GHZ time.
    GhzScaling(Common),
    /// Run the invariant suite; exits with 3 if any invariant fails.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coherence ratio omega0 / gamma; a comma list is accepted.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    fidelity_target: Option<f64>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Extra `key=value` override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn build_config(exp: Experiment, c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text, Some(exp))?
        }
        None => ExperimentConfig::defaults(exp),
    };
    for kv in &c.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{kv}' is not key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(r) = &c.r {
        cfg.set("r", r)?;
    }
    if let Some(f) = c.fidelity_target {
        cfg.fidelity_target = f;
    }
    if let Some(n) = c.n_min {
        cfg.n_min = n;
    }
    if let Some(n) = c.n_max {
        cfg.n_max = n;
    }
    if let Some(n) = c.n_points {
        cfg.n_points = n;
    }
    if let Some(out) = &c.out {
        cfg.output_path = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, common) = match &cli.command {
        Command::Figure1(c) => (Experiment::Figure1, c),
        Command::Figure2(c) => (Experiment::Figure2, c),
        Command::Exclusion(c) => (Experiment::Exclusion, c),
        Command::GhzScaling(c) => (Experiment::GhzScaling, c),
        Command::Validate(c) => (Experiment::Validate, c),
    };
    let cfg = match build_config(exp, common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("qsl: {e}");
            return ExitCode::from(2);
        }
    };

    let mut failed = false;
    let dataset = if exp == Experiment::Validate {
        experiments::validation_records(&cfg).and_then(|recs| {
            failed = recs.iter().any(|r| !r.pass);
            for r in recs.iter().filter(|r| !r.pass) {
                eprintln!("qsl: invariant {} failed (max violation {:e})", r.name, r.max_violation);
            }
            experiments::records_dataset(&recs)
        })
    } else {
        experiments::run(&cfg)
    };
    let dataset = match dataset {
        Ok(ds) => ds,
        Err(e @ Error::Config(_)) => {
            eprintln!("qsl: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("qsl: {e}");
            return ExitCode::FAILURE;
        }
    };

    match &cfg.output_path {
        Some(path) => {
            if let Err(e) = dataset.write_to(path) {
                eprintln!("qsl: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{}", dataset.to_csv_string()),
    }
    if failed {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
