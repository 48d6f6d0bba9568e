//! Loads an experiment description from a `key = value` file, runs it and
//! writes the CSV table.
//!
//! ```text
//! cargo run --release --example spec_file -- specs/robust.conf results/robust.csv
//! ```

use std::path::PathBuf;

use wmmse_ic::experiment::{emit_csv, result_csv, run_experiment, ExperimentSpec};

fn main() -> wmmse_ic::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs/equal-weights.conf"));
    let mut spec = ExperimentSpec::from_file(&path)?;
    // Keep the demo quick unless asked otherwise.
    if std::env::var_os("FULL").is_none() {
        spec.trials = spec.trials.min(10);
    }
    let table = run_experiment(&spec)?;
    match args.next().map(PathBuf::from).or(spec.output.clone()) {
        Some(out) => {
            emit_csv(&table, &out)?;
            println!("wrote {} rows to {}", table.rows.len(), out.display());
        }
        None => print!("{}", result_csv(&table)),
    }
    Ok(())
}
