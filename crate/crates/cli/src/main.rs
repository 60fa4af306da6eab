//! Command-line runner for the kglab laboratory.
//!
//! Every run writes its data files, `summary.json` and, once the run has
//! completed, `manifest.json` into the output directory. Exit status is 0
//! on success, 1 when a verification sweep fails, 2 for bad configuration
//! and 3 for numerical aborts.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::error::CliError;
use crate::output::OutputDir;

#[derive(Parser)]
#[command(name = "kglab", version, about = "Experiments on quadratic Klein-Gordon systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for stochastic commands; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve Gaussian data and write norms, energy and scattering increments.
    Simulate,
    /// Picard iteration of the Duhamel formula.
    Picard,
    VerifyModulation,
    VerifyNonresonance,
    VerifyShell,
    VerifyBilinear,
    VerifyTrilinear,
    /// Admissibility table for the configured exponent pairs.
    Strichartz,
    /// Strauss exponent for n = 1..6.
    Strauss,
    /// Variation norms of a trajectory stored by `simulate`.
    Variation,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Picard => "picard",
            Command::VerifyModulation => "verify-modulation",
            Command::VerifyNonresonance => "verify-nonresonance",
            Command::VerifyShell => "verify-shell",
            Command::VerifyBilinear => "verify-bilinear",
            Command::VerifyTrilinear => "verify-trilinear",
            Command::Strichartz => "strichartz",
            Command::Strauss => "strauss",
            Command::Variation => "variation",
        }
    }

    fn stochastic(self) -> bool {
        matches!(
            self,
            Command::VerifyModulation
                | Command::VerifyNonresonance
                | Command::VerifyShell
                | Command::VerifyBilinear
                | Command::VerifyTrilinear
        )
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cmd = cli.command;
    let mut loaded = config::load(cli.config.as_deref(), cmd.name())?;
    if let Some(seed) = cli.seed {
        loaded.config.seed = Some(seed);
    }
    if let Some(out) = cli.out {
        loaded.config.out = Some(out);
    }
    let seed = match (cmd.stochastic(), loaded.config.seed) {
        (true, None) => return Err(CliError::Config(format!("`{}` needs a seed", cmd.name()))),
        (_, s) => s.unwrap_or(0),
    };
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let root = loaded.config.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(cmd.name()));
    let mut out = OutputDir::create(&root)?;
    let l = &loaded;
    let o = &mut out;
    let Outcome { summary, passed } = match cmd {
        Command::Simulate => commands::simulate(l, o),
        Command::Picard => commands::picard(l, o),
        Command::VerifyModulation => commands::verify_modulation(l, seed, o),
        Command::VerifyNonresonance => commands::verify_nonresonance(l, seed, o),
        Command::VerifyShell => commands::verify_shell(l, seed, o),
        Command::VerifyBilinear => commands::verify_bilinear_sweep(l, seed, o),
        Command::VerifyTrilinear => commands::verify_trilinear_sweep(l, seed, o),
        Command::Strichartz => commands::strichartz(l, o),
        Command::Strauss => commands::strauss(o),
        Command::Variation => commands::variation(l, o),
    }?;
    out.finish(cmd.name(), &loaded.config, summary)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("`{}` sweep did not pass; see {}", cmd.name(), root.display())))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kglab: {e}");
            e.exit_code()
        }
    }
}
