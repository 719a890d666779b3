use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zlab::config::{CheckName, RunConfig};
use zlab::run::{configure_threads, run, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "zlab", version, about = "Checks and bounds for factorizing two-particle S-matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Axiom residuals, analyticity sampling and ‖S‖_κ.
    Verify(Flags),
    /// Cocycle, projector, confluence and exchange relations.
    FockTest(Flags),
    Diagrams(Flags),
    Bounds(Flags),
    Smin(Flags),
    Intertwiner(Flags),
    Wedge(Flags),
    /// The checks listed in the config (all of them by default).
    All(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the check list; repeatable.
    #[arg(long = "check")]
    checks: Vec<String>,
    /// `name=value`; repeatable.
    #[arg(long = "tolerance")]
    tolerances: Vec<String>,
}

fn build_config(default: Option<CheckName>, flags: &Flags) -> zlab::Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_json("{}")?,
    };
    if let Some(c) = default {
        cfg.checks = vec![c];
    }
    if !flags.checks.is_empty() {
        cfg.checks = flags.checks.iter().map(|c| CheckName::parse(c)).collect::<zlab::Result<_>>()?;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(o) = &flags.out {
        cfg.output.dir = o.clone();
    }
    for t in &flags.tolerances {
        cfg.set_tolerance(t)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (default, flags) = match &cli.command {
        Command::Verify(f) => (Some(CheckName::Axioms), f),
        Command::FockTest(f) => (Some(CheckName::Fock), f),
        Command::Diagrams(f) => (Some(CheckName::Diagrams), f),
        Command::Bounds(f) => (Some(CheckName::Bounds), f),
        Command::Smin(f) => (Some(CheckName::Smin), f),
        Command::Intertwiner(f) => (Some(CheckName::Intertwiner), f),
        Command::Wedge(f) => (Some(CheckName::Wedge), f),
        Command::All(f) => (None, f),
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let cfg = match build_config(default, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let out = run(&cfg);
    for (check, passed) in &out.results {
        println!("{:<12} {}", check.as_str(), if *passed { "pass" } else { "FAIL" });
    }
    if let Some(p) = &out.report_path {
        println!("report: {}", p.display());
    }
    ExitCode::from(out.exit_code as u8)
}
