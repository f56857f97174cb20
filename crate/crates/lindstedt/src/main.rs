use clap::{Parser, Subcommand};
use lindstedt::cli::{self, RunConfig, Workspace};
use std::path::PathBuf;
use std::process::ExitCode;

/// Perturbative construction and verification of quasi-periodic invariant
/// tori for weakly coupled rotator systems.
#[derive(Parser)]
#[command(name = "lindstedt", version, about)]
struct Args {
    /// Path to the JSON run configuration.
    #[arg(long, global = true, default_value = "config.json")]
    config: PathBuf,
    /// Output directory for JSON/CSV artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker-thread cap; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divisor minima, Bryuno partial sums and the scale sequences.
    Smalldiv,
    /// Coefficient tables of the formal expansion.
    Series,
    /// The identity battery on trees and self-energy matrices.
    VerifyLemmas,
    /// Sampled self-energy matrices with their first two derivatives.
    SelfEnergy,
    /// Bifurcation regime, roots and continued branches.
    Bifurcation,
    /// Assembled torus with residual and integration reports.
    Torus,
    /// Every assertion suite; exit code 0 only if all pass.
    Verify,
}

fn main() -> ExitCode {
    env_logger::init();
    let args = Args::parse();
    if let Some(n) = args.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg: RunConfig = match std::fs::read_to_string(&args.config)
        .map_err(lindstedt::Error::from)
        .and_then(|s| serde_json::from_str(&s).map_err(lindstedt::Error::from))
    {
        Ok(c) => c,
        Err(e) => {
            cli::write_error_report(&args.out, &e);
            return ExitCode::from(2);
        }
    };
    let ws = match Workspace::build(cfg) {
        Ok(w) => w,
        Err(e) => {
            cli::write_error_report(&args.out, &e);
            return ExitCode::from(2);
        }
    };
    let outcome = match args.command {
        Command::Smalldiv => cli::cmd_smalldiv(&ws, &args.out),
        Command::Series => cli::cmd_series(&ws, &args.out).map(|(_, o)| o),
        Command::VerifyLemmas => cli::cmd_verify_lemmas(&ws, &args.out),
        Command::SelfEnergy => cli::cmd_self_energy(&ws, &args.out),
        Command::Bifurcation => cli::cmd_bifurcation(&ws, &args.out),
        Command::Torus => cli::cmd_torus(&ws, &args.out),
        Command::Verify => cli::cmd_verify(&ws, &args.out),
    };
    match outcome {
        Ok(o) => {
            o.print();
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            cli::write_error_report(&args.out, &e);
            ExitCode::from(2)
        }
    }
}
