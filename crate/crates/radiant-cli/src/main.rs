//! `radiant`: the command-line toolchain for the activity detection
//! language. Four subcommands cover the pipeline end to end: `check`
//! validates a program, `compile` lowers it to detector specifications,
//! `run` executes detectors over recorded or live sensor streams, and
//! `eval` scores a detection log against ground truth.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod check;
mod compile;
mod eval;
mod fail;
mod load;
mod run;

#[derive(Parser)]
#[command(
    name = "radiant",
    version,
    about = "Detect process activities in IoT sensor streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and validate it against a device configuration
    Check {
        /// Activity definition program
        program: PathBuf,
        /// Device configuration (YAML)
        config: PathBuf,
    },
    /// Lower a program into one detector specification per activity
    Compile(compile::CompileArgs),
    /// Replay trace files or subscribe to live streams and detect activities
    Run(run::RunArgs),
    /// Score a detection log against a ground-truth interval log
    Eval(eval::EvalArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { program, config } => check::run(&program, &config),
        Command::Compile(args) => compile::run(&args),
        Command::Run(args) => run::run(&args),
        Command::Eval(args) => eval::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.report(),
    }
}
