//! Batch experiment runner. Every verification in the core library is a
//! subcommand; each writes CSV artifacts plus a text report into --out and
//! exits 0 (all checks pass), 2 (a check failed), 1 (computational error)
//! or 64 (bad config).

mod config;
mod runners;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nehari", version, about = "Variational toolkit experiment runner")]
struct Cli {
    /// Config file overlaid on the built-in defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV artifacts and reports
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Rayon worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat warnings as failures
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Shoot the radial ground state and verify its identities
    GroundState,
    /// Exponential decay law of the ground state tail
    Decay,
    /// Best Sobolev constant and the critical concentration level
    Sobolev,
    /// Energy-level ordering across the configured eps list
    Levels,
    /// Two-bump cross integrals and the interaction constant c1
    Interaction,
    /// Two-bump norm expansion brackets and the gamma coefficient
    TwoBump,
    /// Min-max level scan over the path parameter grid
    Scan,
    /// Barycenter localization of translated bumps
    Barycenter,
    /// Barycenter-zero candidate on the path and its energy certificate
    BetaZero,
    /// Full level inequality chain at the configured rho
    Chain,
    /// Quotient comparison condition across sampled centers
    #[command(name = "check-18-24")]
    Check1824,
    /// Decreasing translated-bump energies on the exterior domain
    Nonexistence,
    /// Every subcommand in sequence, aggregated summary
    All,
}

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_CONFIG: u8 = 64;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let cfg = match config::ExperimentConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }

    let names: Vec<Command> = if cli.command == Command::All {
        vec![
            Command::GroundState,
            Command::Decay,
            Command::Sobolev,
            Command::Levels,
            Command::Interaction,
            Command::TwoBump,
            Command::Scan,
            Command::Barycenter,
            Command::BetaZero,
            Command::Chain,
            Command::Check1824,
            Command::Nonexistence,
        ]
    } else {
        vec![cli.command]
    };

    let mut any_fail = false;
    let mut any_warn = false;
    for cmd in names {
        let label = runners::label(cmd);
        match runners::run(cmd, &cfg, &cli.out) {
            Ok(outcome) => {
                for c in &outcome.checks {
                    let tag = if c.pass { "pass" } else { "FAIL" };
                    println!(
                        "[{tag}] {label}/{}: lhs={:.10e} rhs={:.10e} margin={:.3e}{}",
                        c.name,
                        c.lhs,
                        c.rhs,
                        c.margin,
                        if c.note.is_empty() { String::new() } else { format!(" ({})", c.note) }
                    );
                    any_fail |= !c.pass;
                }
                for w in &outcome.warnings {
                    println!("warning: {label}: {w}");
                    any_warn = true;
                }
            }
            Err(e) => {
                eprintln!("error: {label}: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if any_fail || (cli.strict && any_warn) {
        println!("RESULT: FAIL");
        ExitCode::from(EXIT_CHECK_FAILED)
    } else {
        println!("RESULT: PASS");
        ExitCode::SUCCESS
    }
}
