use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nlqubit_cli::{config, experiments};

/// Batch front end for the nonlinear condensate-qubit simulator.
#[derive(Parser)]
#[command(name = "nlqubit", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `out_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// RNG seed (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config file and list every violation without running.
    Validate { config: PathBuf },
}

// Exit codes: 0 success, 1 invalid config, 2 numerical/execution failure,
// 3 inconclusive-dominated discrimination run.
fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Validate { config } => match config::load(&config) {
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(1)
            }
            Ok(cfg) => {
                let violations = config::validate(&cfg);
                if violations.is_empty() {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                } else {
                    for v in &violations {
                        println!("violation: {v}");
                    }
                    ExitCode::from(1)
                }
            }
        },
        Cmd::Run { config, out, seed } => {
            let cfg = match config::load(&config) {
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
                Ok(cfg) => cfg,
            };
            let violations = config::validate(&cfg);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return ExitCode::from(1);
            }
            let out_dir = out
                .or_else(|| cfg.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            let seed = seed.unwrap_or(cfg.seed);
            match experiments::run_experiment(&cfg, &out_dir, seed) {
                Err(e) => {
                    eprintln!("run failed: {e:#}");
                    ExitCode::from(2)
                }
                Ok(outcome) => {
                    for path in &outcome.outputs {
                        println!("wrote {}", path.display());
                    }
                    if outcome.numerical_failures > 0 {
                        eprintln!(
                            "{} cell(s) failed numerically; see run_manifest.json",
                            outcome.numerical_failures
                        );
                        ExitCode::from(2)
                    } else if outcome.inconclusive_dominated {
                        eprintln!("more than half of the shots were inconclusive");
                        ExitCode::from(3)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
            }
        }
    }
}
