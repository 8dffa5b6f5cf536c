use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tdm3d::run::{run, RunOptions, Subcommand};
use tdm3d::scenario::load_scenario;

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Select,
    Profile,
    Schedule,
    Interleave,
    Render,
    Sweep,
    Crosstalk,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Select => Subcommand::Select,
            Command::Profile => Subcommand::Profile,
            Command::Schedule => Subcommand::Schedule,
            Command::Interleave => Subcommand::Interleave,
            Command::Render => Subcommand::Render,
            Command::Sweep => Subcommand::Sweep,
            Command::Crosstalk => Subcommand::Crosstalk,
        }
    }
}

/// Directional-backlight display simulator.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; defaults to the scenario's `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the Monte-Carlo ray histogram written by `profile`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_scenario(&cli.scenario)
        .and_then(|s| run(cli.command.into(), &s, &RunOptions { out_dir: cli.out, seed: cli.seed }));
    match result {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("{}", path.display());
            }
            for v in &outcome.violations {
                eprintln!("violation: {v}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
