use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "qflow", version, about = "Quantum stochastic flow experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON, schema 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Coefficient field; overrides the config.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Seed for randomized sampling of validation words.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Check the structure relations and the product formula.
    Validate,
    /// Growth profiles `n, upper, lower, class`.
    Growth,
    /// Vacuum semigroup (or cocycle matrix elements) on a time grid.
    Semigroup,
    /// Series evaluation against the independent oracles.
    Compare,
    /// Dump iterates as JSON lines.
    Iterate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config.clone() else {
        eprintln!("error: --config is required");
        return ExitCode::from(2);
    };
    let run = commands::Run {
        config,
        out: cli.out.clone(),
        mode: cli.mode.map(|m| match m {
            ModeArg::Exact => qflow::config::Mode::Exact,
            ModeArg::Float => qflow::config::Mode::Float,
        }),
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Validate => commands::validate(&run),
        Command::Growth => commands::growth(&run),
        Command::Semigroup => commands::semigroup(&run),
        Command::Compare => commands::compare(&run),
        Command::Iterate => commands::iterate(&run),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
