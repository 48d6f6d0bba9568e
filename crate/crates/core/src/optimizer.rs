//! Alternating weighted-MMSE optimization of the weighted sum rate.
//!
//! Each iteration recomputes, from the current precoders, the MMSE receivers
//! and the MSE weights `μ_k E_k⁻¹ / ln 2`, then solves for new precoders under
//! the sum-power or per-node constraint. The loop stops once the weighted sum
//! rate moves by less than `epsilon` between iterations and returns the best
//! iterate seen, not necessarily the last one.

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::filters::{self, PowerConstraint, RateWeights, TransceiverState};
use crate::linalg::{self, identity, CMat, C64};
use crate::rng::{self, Purpose};
use crate::robust::{self, RobustContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Leading `d` right-singular vectors of each direct channel `H_kk`.
    RightSingular,
    /// I.i.d. `CN(0, 1)` entries drawn from the given seed.
    RandomGaussian(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Stop once `|R_sum^(l) − R_sum^(l−1)| < epsilon` (bits).
    pub epsilon: f64,
    pub max_iters: usize,
    pub init: InitStrategy,
    /// Extra runs from random initializations; the best result is kept.
    pub restarts: usize,
    /// Seed for the restart initializations.
    pub restart_seed: u64,
    /// Relative tolerance on the per-node power constraint.
    pub bisection_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iters: 200,
            init: InitStrategy::RightSingular,
            restarts: 0,
            restart_seed: 0,
            bisection_tol: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bisection tolerance {} must be positive",
                self.bisection_tol
            )));
        }
        Ok(())
    }
}

/// Relative dip in `R_sum` tolerated before an iteration is counted as a
/// monotonicity violation.
pub const MONOTONE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizerTrace {
    /// `R_sum^(l)` for `l = 0, 1, …` (entry 0 is the initialization).
    pub wsr: Vec<f64>,
    /// `Σ_k Tr(E_k)` of the MMSE receivers at each iterate.
    pub sum_mse: Vec<f64>,
    /// Worst relative violation of the power constraint at each iterate
    /// (clamped per-node users excluded).
    pub power_error: Vec<f64>,
    /// Per-iteration multipliers, one entry per user (per-node mode only).
    pub lambdas: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub best_iteration: usize,
    pub clamp_events: usize,
    pub monotonicity_violations: usize,
    /// Runs performed, including restarts.
    pub runs: usize,
}

impl OptimizerTrace {
    pub fn best_wsr(&self) -> f64 {
        self.wsr.get(self.best_iteration).copied().unwrap_or(0.0)
    }
}

/// `Σ_k μ_k R_k` on the given channels.
pub fn weighted_sum_rate(channels: &ChannelSet, precoders: &[CMat], mu: &RateWeights) -> Result<f64> {
    check_mu(channels, mu)?;
    let mut total = 0.0;
    for (k, m) in mu.as_slice().iter().enumerate() {
        total += m * filters::achievable_rate(channels, precoders, k)?;
    }
    Ok(total)
}

fn check_mu(channels: &ChannelSet, mu: &RateWeights) -> Result<()> {
    if mu.len() != channels.k() {
        return Err(Error::InvalidParameter(format!("{} rate weights for K = {}", mu.len(), channels.k())));
    }
    Ok(())
}

/// Initial precoders meeting the power constraint with equality (an equal
/// `P_T / K` split in sum-power mode).
pub fn initialize_precoders(
    channels: &ChannelSet,
    constraint: &PowerConstraint,
    init: InitStrategy,
) -> Result<Vec<CMat>> {
    let dims = channels.dims();
    constraint.validate(dims.k)?;
    (0..dims.k)
        .map(|k| {
            let p = constraint.initial_power(k, dims.k);
            let v = match init {
                InitStrategy::RightSingular => linalg::leading_right_singular(channels.h(k, k), dims.d),
                InitStrategy::RandomGaussian(seed) => {
                    let mut r = rng::stream(seed, Purpose::Init, k as u64);
                    rng::complex_gaussian_matrix(&mut r, dims.m, dims.d, 1.0)
                }
            };
            let norm = linalg::power(&v);
            if norm == 0.0 {
                return Err(Error::Degenerate("initial precoder draw is zero".into()));
            }
            Ok(v.scale((p / norm).sqrt()))
        })
        .collect()
}

/// How the MSE weights are chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WeightRule {
    /// `μ_k E_k⁻¹ / ln 2`.
    Wmmse,
    /// `W_k = I_d` (unweighted MMSE transceiver).
    Identity,
}

/// The filter algebra the loop runs on: nominal on the design channels, or
/// the mismatch-aware variants.
struct Designer<'a> {
    channels: &'a ChannelSet,
    robust: Option<&'a RobustContext>,
}

impl Designer<'_> {
    fn receiver(&self, v: &[CMat], k: usize) -> Result<CMat> {
        match self.robust {
            Some(ctx) => robust::robust_receiver(ctx, v, k),
            None => filters::mmse_receiver(self.channels, v, k),
        }
    }

    fn error(&self, v: &[CMat], k: usize) -> Result<CMat> {
        match self.robust {
            Some(ctx) => robust::robust_error_covariance(ctx, v, k),
            None => filters::error_covariance(self.channels, v, k),
        }
    }

    fn objective(&self, v: &[CMat], mu: &RateWeights) -> Result<f64> {
        match self.robust {
            Some(ctx) => {
                let mut total = 0.0;
                for (k, m) in mu.as_slice().iter().enumerate() {
                    total += m * robust::robust_rate(ctx, v, k)?;
                }
                Ok(total)
            }
            None => weighted_sum_rate(self.channels, v, mu),
        }
    }

    fn sum_mse(&self, v: &[CMat]) -> Result<f64> {
        let mut total = 0.0;
        for k in 0..self.channels.k() {
            total += linalg::trace_re(&self.error(v, k)?);
        }
        Ok(total)
    }

    fn receivers_and_weights(&self, v: &[CMat], mu: &RateWeights, rule: WeightRule) -> Result<(Vec<CMat>, Vec<CMat>)> {
        let k_users = self.channels.k();
        let u = (0..k_users).map(|k| self.receiver(v, k)).collect::<Result<Vec<_>>>()?;
        let w = match rule {
            WeightRule::Identity => vec![identity(self.channels.dims().d); k_users],
            WeightRule::Wmmse => match self.robust {
                Some(ctx) => robust::robust_weights(ctx, v, mu)?,
                None => {
                    let e = (0..k_users).map(|k| self.error(v, k)).collect::<Result<Vec<_>>>()?;
                    filters::mse_weights(&e, mu)?
                }
            },
        };
        Ok((u, w))
    }

    fn precoders(
        &self,
        u: &[CMat],
        w: &[CMat],
        constraint: &PowerConstraint,
        tol: f64,
        trace: &mut OptimizerTrace,
    ) -> Result<(Vec<CMat>, f64)> {
        match constraint {
            PowerConstraint::SumPower(p_t) => {
                let sol = match self.robust {
                    Some(ctx) => robust::robust_sum_power_precoders(ctx, u, w, *p_t)?,
                    None => filters::sum_power_precoders(self.channels, u, w, *p_t)?,
                };
                let total: f64 = sol.precoders.iter().map(linalg::power).sum();
                Ok((sol.precoders, ((total - p_t) / p_t).abs()))
            }
            PowerConstraint::PerNode(budgets) => {
                let mut v = Vec::with_capacity(budgets.len());
                let mut lambdas = Vec::with_capacity(budgets.len());
                let mut worst: f64 = 0.0;
                for (k, p_k) in budgets.iter().enumerate() {
                    let sol = match self.robust {
                        Some(ctx) => robust::robust_per_node_precoder(ctx, u, w, k, *p_k, tol)?,
                        None => filters::per_node_precoder(self.channels, u, w, k, *p_k, tol)?,
                    };
                    if sol.clamped {
                        trace.clamp_events += 1;
                    } else {
                        worst = worst.max(((linalg::power(&sol.precoder) - p_k) / p_k).abs());
                    }
                    lambdas.push(sol.lambda);
                    v.push(sol.precoder);
                }
                trace.lambdas.push(lambdas);
                Ok((v, worst))
            }
        }
    }
}

fn initial_power_error(v: &[CMat], constraint: &PowerConstraint) -> f64 {
    match constraint {
        PowerConstraint::SumPower(p) => ((v.iter().map(linalg::power).sum::<f64>() - p) / p).abs(),
        PowerConstraint::PerNode(ps) => v
            .iter()
            .zip(ps)
            .map(|(v, p)| ((linalg::power(v) - p) / p).abs())
            .fold(0.0, f64::max),
    }
}

fn direct_links_vanish(channels: &ChannelSet) -> bool {
    (0..channels.k()).all(|k| channels.h(k, k).iter().all(|z| *z == C64::new(0.0, 0.0)))
}

fn single_run(
    designer: &Designer<'_>,
    mu: &RateWeights,
    constraint: &PowerConstraint,
    config: &OptimizerConfig,
    init: InitStrategy,
    rule: WeightRule,
) -> Result<(Vec<CMat>, OptimizerTrace)> {
    let mut v = initialize_precoders(designer.channels, constraint, init)?;
    let mut trace = OptimizerTrace { runs: 1, ..Default::default() };
    let mut current = designer.objective(&v, mu)?;
    trace.wsr.push(current);
    trace.sum_mse.push(designer.sum_mse(&v)?);
    trace.power_error.push(initial_power_error(&v, constraint));

    // No signal reaches any receiver whatever the precoders are: every
    // feasible point has zero rate and the filter updates are undefined.
    if direct_links_vanish(designer.channels) {
        trace.converged = true;
        return Ok((v, trace));
    }

    let mut best = (current, v.clone());
    for l in 1..=config.max_iters {
        let (u, w) = designer.receivers_and_weights(&v, mu, rule)?;
        let (next, power_error) = designer.precoders(&u, &w, constraint, config.bisection_tol, &mut trace)?;
        v = next;
        let r = designer.objective(&v, mu)?;
        if !r.is_finite() {
            return Err(Error::NonFinite(format!("weighted sum rate at iteration {l}")));
        }
        trace.wsr.push(r);
        trace.sum_mse.push(designer.sum_mse(&v)?);
        trace.power_error.push(power_error);
        trace.iterations = l;
        if rule == WeightRule::Wmmse && r < current - MONOTONE_TOL * current.abs() - 1e-12 {
            trace.monotonicity_violations += 1;
            log::warn!("R_sum decreased from {current:.9} to {r:.9} at iteration {l}");
        }
        if r > best.0 {
            best = (r, v.clone());
            trace.best_iteration = l;
        }
        let delta = (r - current).abs();
        current = r;
        if delta < config.epsilon {
            trace.converged = true;
            break;
        }
    }
    Ok((best.1, trace))
}

pub(crate) fn alternate(
    channels: &ChannelSet,
    mu: &RateWeights,
    constraint: &PowerConstraint,
    config: &OptimizerConfig,
    robust_ctx: Option<&RobustContext>,
    rule: WeightRule,
) -> Result<(TransceiverState, OptimizerTrace)> {
    config.validate()?;
    let design_channels = robust_ctx.map_or(channels, |c| &c.estimated_channels);
    check_mu(design_channels, mu)?;
    constraint.validate(design_channels.k())?;
    let designer = Designer { channels: design_channels, robust: robust_ctx };

    let mut best = single_run(&designer, mu, constraint, config, config.init, rule)?;
    for r in 0..config.restarts {
        let init = InitStrategy::RandomGaussian(rng::mix_seed(config.restart_seed, r as u64));
        let candidate = single_run(&designer, mu, constraint, config, init, rule)?;
        let runs = best.1.runs + 1;
        if candidate.1.best_wsr() > best.1.best_wsr() {
            best = candidate;
        }
        best.1.runs = runs;
    }

    let (v, trace) = best;
    let (u, w) = designer.receivers_and_weights(&v, mu, rule)?;
    Ok((TransceiverState { precoders: v, receivers: u, weights: w }, trace))
}

/// Runs the weighted-MMSE alternating optimization. With `robust_ctx`, the
/// design uses the estimated channels and the mismatch-aware filters, and
/// `channels` is not consulted.
///
/// The returned receivers and weights are the ones consistent with the
/// returned precoders.
pub fn run_algorithm1(
    channels: &ChannelSet,
    mu: &RateWeights,
    constraint: &PowerConstraint,
    config: &OptimizerConfig,
    robust_ctx: Option<&RobustContext>,
) -> Result<(TransceiverState, OptimizerTrace)> {
    alternate(channels, mu, constraint, config, robust_ctx, WeightRule::Wmmse)
}
