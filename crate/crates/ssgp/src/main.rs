//! Command-line front end for the experiment harness.
//!
//! Exit codes: 0 all checks pass, 1 a check failed its tolerance,
//! 2 usage or configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssgp::harness::config::{parse_config, ExperimentConfig, ExperimentKind};
use ssgp::harness::{emit_outputs, run_experiment};
use ssgp::simulate::sample_path;
use ssgp::Error;

#[derive(Parser)]
#[command(
    name = "ssgp",
    about = "Numerical laboratory for additive functionals of self-similar Gaussian processes"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Path to a flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for report.csv, summary.txt and plots.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replica-parallel experiments.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one path and write it as CSV to stdout or --out/path.csv.
    Simulate,
    /// Conditional-variance and spectral lower-bound audit.
    SlndCheck,
    /// Limiting constants with oracle cross-checks.
    Constants,
    /// Exact moment formula vs simulated mixture.
    Moments,
    /// Monte Carlo verification in the supercritical regime.
    VerifyClt,
    /// Monte Carlo verification at the critical index.
    VerifyCritical,
    /// Squared-gap decay check in the degenerate regime.
    VerifyThm3,
}

impl Command {
    fn kind(&self) -> Option<ExperimentKind> {
        match self {
            Command::Simulate => None,
            Command::SlndCheck => Some(ExperimentKind::SlndAudit),
            Command::Constants => Some(ExperimentKind::Constants),
            Command::Moments => Some(ExperimentKind::Moments),
            Command::VerifyClt => Some(ExperimentKind::VerifyClt),
            Command::VerifyCritical => Some(ExperimentKind::VerifyCritical),
            Command::VerifyThm3 => Some(ExperimentKind::VerifyDegenerate),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut text = match &cli.global.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => String::new(),
    };
    if let Some(kind) = cli.command.kind() {
        // the subcommand fixes the experiment kind; a conflicting config
        // line is a usage error
        if text
            .lines()
            .any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("kind"))
        {
            let configured = parse_config(&text)?;
            if configured.kind != kind {
                return Err(Error::Validation(format!(
                    "config says kind = {}, subcommand is {}",
                    configured.kind.name(),
                    kind.name()
                )));
            }
        } else {
            text = format!("kind = {}\n{text}", kind.name());
        }
    }
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.global.out {
        cfg.out_dir = Some(out.clone());
    }
    if let Some(threads) = cli.global.threads {
        cfg.threads = threads.max(1);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    if matches!(cli.command, Command::Simulate) {
        let cfg = {
            // a config without kind= is fine for simulate
            let mut text = match &cli.global.config {
                Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    source: e,
                })?,
                None => String::new(),
            };
            if !text.lines().any(|l| l.trim_start().starts_with("kind")) {
                text = format!("kind = constants\n{text}");
            }
            let mut cfg = parse_config(&text)?;
            if let Some(seed) = cli.global.seed {
                cfg.seed = seed;
            }
            if let Some(out) = &cli.global.out {
                cfg.out_dir = Some(out.clone());
            }
            cfg
        };
        let path = sample_path(cfg.spec, cfg.t_max, cfg.n_steps, cfg.seed)?;
        match &cfg.out_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.display().to_string(),
                    source: e,
                })?;
                let file = dir.join("path.csv");
                let mut w = std::fs::File::create(&file).map_err(|e| Error::Io {
                    path: file.display().to_string(),
                    source: e,
                })?;
                path.write_csv(&mut w).map_err(|e| Error::Io {
                    path: file.display().to_string(),
                    source: e,
                })?;
                eprintln!("wrote {}", file.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                path.write_csv(&mut out).map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })?;
            }
        }
        return Ok(true);
    }

    let cfg = load_config(cli)?;
    let report = run_experiment(&cfg)?;
    for line in &report.summary {
        println!("{line}");
    }
    if let Some(dir) = &cfg.out_dir {
        for file in emit_outputs(&report, dir)? {
            eprintln!("wrote {file}");
        }
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Validation(_) | Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
