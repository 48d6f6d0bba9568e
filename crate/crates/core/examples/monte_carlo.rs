//! A small seeded sweep over SNR for every method and both constraints.
//! Trials run in parallel; the table is identical for any thread count.

use wmmse_ic::experiment::{run_experiment, summary, ConstraintMode, ExperimentSpec, MethodKind};

fn main() -> wmmse_ic::Result<()> {
    let spec = ExperimentSpec {
        snr_points_db: vec![0.0, 10.0, 20.0],
        methods: vec![MethodKind::Wmmse, MethodKind::SimpleMmse, MethodKind::Gradient],
        constraints: vec![ConstraintMode::Sum, ConstraintMode::PerNode],
        trials: 20,
        master_seed: 9,
        ..ExperimentSpec::default()
    };
    let table = run_experiment(&spec)?;
    print!("{}", summary(&table));
    Ok(())
}
