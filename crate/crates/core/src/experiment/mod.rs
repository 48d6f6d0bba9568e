//! Monte Carlo sweeps over SNR for the selected design methods.
//!
//! A sweep is described by an [`ExperimentSpec`], normally read from a flat
//! `key = value` file (see [`ExperimentSpec::parse`]), and produces a
//! [`ResultTable`] with one row per (SNR, method, constraint, CSI variant).

mod output;
mod run;
mod spec;

pub use output::{
    complexity_csv, emit_complexity_curves, emit_csv, format_sig, parse_csv, result_csv, summary,
    COMPLEXITY_HEADER, RESULT_HEADER,
};
pub use run::{run_experiment, CsiVariant, ResultRow, ResultTable};
pub use spec::{ConstraintMode, ExperimentSpec, MethodKind, MuProfile, RobustSetting};
