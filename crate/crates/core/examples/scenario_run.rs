//! Runs every pipeline on a scenario file (the bundled one by default) and
//! prints the artifacts written.

use tdm3d::run::{run, RunOptions, Subcommand};
use tdm3d::scenario::{load_scenario, Scenario};

fn main() -> tdm3d::Result<()> {
    let sc = match std::env::args().nth(1) {
        Some(path) => load_scenario(path)?,
        None => Scenario::bundled(),
    };
    let options = RunOptions { out_dir: None, seed: Some(1) };
    for cmd in Subcommand::ALL {
        let outcome = run(cmd, &sc, &options)?;
        for path in &outcome.artifacts {
            println!("{cmd:>10}  {}", path.display());
        }
        for v in &outcome.violations {
            println!("{cmd:>10}  violation: {v}");
        }
    }
    Ok(())
}
