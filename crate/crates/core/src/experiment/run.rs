use rayon::prelude::*;

use super::spec::{ConstraintMode, ExperimentSpec, MethodKind};
use crate::baselines::{projected_gradient_wsr, simple_mmse_run};
use crate::channel::{apply_mismatch, generate_channels, snr_to_sigma_h, ChannelSet};
use crate::error::Result;
use crate::filters::RateWeights;
use crate::optimizer::{run_algorithm1, weighted_sum_rate};
use crate::rng::mix_seed;
use crate::robust::RobustContext;

/// Which channel knowledge the design used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsiVariant {
    /// Designed on the true channels.
    Perfect,
    /// Designed on the estimates as if they were exact.
    Naive,
    /// Designed on the estimates with the mismatch-aware filters.
    Robust,
}

impl CsiVariant {
    pub fn label(self) -> &'static str {
        match self {
            Self::Perfect => "perfect",
            Self::Naive => "naive",
            Self::Robust => "robust",
        }
    }
}

impl std::str::FromStr for CsiVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "perfect" => Ok(Self::Perfect),
            "naive" => Ok(Self::Naive),
            "robust" => Ok(Self::Robust),
            other => Err(format!("unknown CSI variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub method: MethodKind,
    pub constraint: ConstraintMode,
    pub csi: CsiVariant,
    pub mean_wsr: f64,
    /// Sample standard deviation over `√trials`.
    pub std_err: f64,
    pub mean_iters: f64,
    pub clamp_count: usize,
    /// Trials skipped because the design hit a degenerate instance.
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn find(&self, snr_db: f64, method: MethodKind, constraint: ConstraintMode, csi: CsiVariant) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.method == method && r.constraint == constraint && r.csi == csi)
    }
}

#[derive(Debug, Clone, Copy)]
struct RowKey {
    snr_db: f64,
    method: MethodKind,
    constraint: ConstraintMode,
    csi: CsiVariant,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    wsr: f64,
    iterations: f64,
    clamps: usize,
}

fn row_keys(spec: &ExperimentSpec) -> Vec<RowKey> {
    let mut keys = Vec::new();
    for &snr_db in &spec.snr_points_db {
        for &method in &spec.methods {
            for &constraint in &spec.constraints {
                let variants: &[CsiVariant] = match (spec.robust.is_some(), method) {
                    (false, _) => &[CsiVariant::Perfect],
                    (true, MethodKind::Wmmse) => &[CsiVariant::Naive, CsiVariant::Robust],
                    (true, _) => &[CsiVariant::Naive],
                };
                keys.extend(variants.iter().map(|&csi| RowKey { snr_db, method, constraint, csi }));
            }
        }
    }
    keys
}

struct TrialChannels {
    truth: ChannelSet,
    design: ChannelSet,
    robust: Option<RobustContext>,
}

fn trial_channels(spec: &ExperimentSpec, snr_db: f64, seed: u64) -> Result<TrialChannels> {
    let sigma_h_sq = snr_to_sigma_h(snr_db);
    let truth = generate_channels(spec.dims, sigma_h_sq, seed)?;
    match spec.robust {
        None => Ok(TrialChannels { design: truth.clone(), truth, robust: None }),
        Some(r) => {
            let sigma_delta_sq = r.sigma_delta_frac * sigma_h_sq;
            let mm = apply_mismatch(&truth, sigma_delta_sq, seed)?;
            let assumed = sigma_delta_sq * (1.0 + r.sigma_eps_frac);
            let ctx = RobustContext::new(mm.estimated_channels.clone(), assumed)?;
            Ok(TrialChannels { truth, design: mm.estimated_channels, robust: Some(ctx) })
        }
    }
}

fn evaluate(spec: &ExperimentSpec, mu: &RateWeights, ch: &TrialChannels, key: &RowKey) -> Result<Outcome> {
    let constraint = key.constraint.constraint(spec.dims.k);
    let (precoders, iterations, clamps) = match key.method {
        MethodKind::Wmmse => {
            let robust = match key.csi {
                CsiVariant::Robust => ch.robust.as_ref(),
                _ => None,
            };
            let (state, trace) = run_algorithm1(&ch.design, mu, &constraint, &spec.optimizer, robust)?;
            (state.precoders, trace.iterations, trace.clamp_events)
        }
        MethodKind::SimpleMmse => {
            let (state, trace) = simple_mmse_run(&ch.design, mu, &constraint, &spec.optimizer)?;
            (state.precoders, trace.iterations, trace.clamp_events)
        }
        MethodKind::Gradient => {
            let (v, trace) = projected_gradient_wsr(&ch.design, mu, &constraint, &spec.gradient)?;
            (v, trace.iterations, 0)
        }
    };
    Ok(Outcome {
        wsr: weighted_sum_rate(&ch.truth, &precoders, mu)?,
        iterations: iterations as f64,
        clamps,
    })
}

fn run_trial(spec: &ExperimentSpec, mu: &RateWeights, keys: &[RowKey], trial: usize) -> Vec<Option<Outcome>> {
    let seed = mix_seed(spec.master_seed, trial as u64);
    let mut out = Vec::with_capacity(keys.len());
    let mut cached: Option<(f64, Result<TrialChannels>)> = None;
    for key in keys {
        if cached.as_ref().map_or(true, |(snr, _)| *snr != key.snr_db) {
            cached = Some((key.snr_db, trial_channels(spec, key.snr_db, seed)));
        }
        let outcome = match &cached.as_ref().unwrap().1 {
            Ok(ch) => evaluate(spec, mu, ch, key),
            Err(e) => Err(crate::error::Error::Degenerate(e.to_string())),
        };
        out.push(match outcome {
            Ok(o) => Some(o),
            Err(e) => {
                log::warn!(
                    "trial {trial}, {} dB, {}/{}/{}: {e}",
                    key.snr_db,
                    key.method.label(),
                    key.constraint.label(),
                    key.csi.label()
                );
                None
            }
        });
    }
    out
}

/// Pairwise summation; the result depends only on the order of `xs`.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Runs every trial of the sweep (in parallel) and aggregates per row.
/// Trial `t` draws its channels from `mix_seed(master_seed, t)`, so the table
/// is identical whatever the scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    if !spec.dims.dof_feasible() {
        log::warn!(
            "K = {}, M = {}, N = {}, d = {} does not satisfy M + N >= (K + 1) d; interference cannot be fully aligned",
            spec.dims.k,
            spec.dims.m,
            spec.dims.n,
            spec.dims.d
        );
    }
    let mu = spec.mu.weights(spec.dims.k)?;
    let keys = row_keys(spec);
    let per_trial: Vec<Vec<Option<Outcome>>> =
        (0..spec.trials).into_par_iter().map(|t| run_trial(spec, &mu, &keys, t)).collect();

    let rows = keys
        .iter()
        .enumerate()
        .map(|(idx, key)| {
            let ok: Vec<Outcome> = per_trial.iter().filter_map(|t| t[idx]).collect();
            let n = ok.len();
            let wsr: Vec<f64> = ok.iter().map(|o| o.wsr).collect();
            let (mean_wsr, std_err, mean_iters) = if n == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = pairwise_sum(&wsr) / n as f64;
                let var = if n > 1 {
                    let dev: Vec<f64> = wsr.iter().map(|x| (x - mean) * (x - mean)).collect();
                    pairwise_sum(&dev) / (n - 1) as f64
                } else {
                    0.0
                };
                let iters: Vec<f64> = ok.iter().map(|o| o.iterations).collect();
                (mean, (var / n as f64).sqrt(), pairwise_sum(&iters) / n as f64)
            };
            ResultRow {
                snr_db: key.snr_db,
                method: key.method,
                constraint: key.constraint,
                csi: key.csi,
                mean_wsr,
                std_err,
                mean_iters,
                clamp_count: ok.iter().map(|o| o.clamps).sum(),
                failed: spec.trials - n,
            }
        })
        .collect();
    Ok(ResultTable { rows })
}
