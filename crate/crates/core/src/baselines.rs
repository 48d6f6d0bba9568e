//! Reference methods to compare the weighted-MMSE design against.
//!
//! * [`simple_mmse_run`]: the same alternating loop with every MSE weight
//!   frozen at the identity, i.e. an unweighted sum-MSE transceiver.
//! * [`projected_gradient_wsr`]: a generic projected gradient ascent on the
//!   weighted sum rate over all precoders jointly, with backtracking and a
//!   radial projection onto the power constraint. Receivers are implicitly
//!   MMSE since the rate expression does not depend on them.

use std::f64::consts::LN_2;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::filters::{self, PowerConstraint, RateWeights, TransceiverState};
use crate::linalg::{self, CMat, C64};
use crate::optimizer::{self, InitStrategy, OptimizerConfig, OptimizerTrace, WeightRule};

/// Alternating MMSE transceiver with `W_k = I`. The trace reports the
/// weighted sum rate with the requested `mu`.
pub fn simple_mmse_run(
    channels: &ChannelSet,
    mu: &RateWeights,
    constraint: &PowerConstraint,
    config: &OptimizerConfig,
) -> Result<(TransceiverState, OptimizerTrace)> {
    optimizer::alternate(channels, mu, constraint, config, None, WeightRule::Identity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientConfig {
    /// Outer iterations (I₁).
    pub outer_iters: usize,
    /// Backtracking trials per outer iteration (I₂).
    pub max_step_trials: usize,
    /// First trial step, relative to `‖V‖_F / ‖∇‖_F`.
    pub initial_step: f64,
    /// Step multiplier after a rejected trial, in (0, 1).
    pub shrink: f64,
    /// Stop once an accepted step improves the WSR by less than this.
    pub epsilon: f64,
    pub mode: GradientMode,
    pub init: InitStrategy,
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self {
            outer_iters: 500,
            max_step_trials: 10,
            initial_step: 0.1,
            shrink: 0.5,
            epsilon: 1e-5,
            mode: GradientMode::Analytic,
            init: InitStrategy::RightSingular,
        }
    }
}

impl GradientConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_iters == 0 || self.max_step_trials == 0 {
            return Err(Error::InvalidParameter("gradient iteration counts must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("gradient step and epsilon must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidParameter(format!("shrink factor {} not in (0, 1)", self.shrink)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientTrace {
    pub wsr: Vec<f64>,
    pub iterations: usize,
    pub step_trials: usize,
    pub converged: bool,
}

/// Analytic gradient of `Σ_k μ_k R_k` (bits) with respect to each `V_j`,
/// returned as `∂/∂Re + i ∂/∂Im`:
///
/// ```text
/// ∇_j = 2/ln2 Σ_k μ_k [ H_kjᴴ J_k⁻¹ H_kj V_j − 1{k≠j} H_kjᴴ Φ_k⁻¹ H_kj V_j ]
/// ```
/// with `J_k = Φ_k + H_kk V_k V_kᴴ H_kkᴴ`.
pub fn wsr_gradient(channels: &ChannelSet, precoders: &[CMat], mu: &RateWeights) -> Result<Vec<CMat>> {
    let k_users = channels.k();
    let mut j_inv = Vec::with_capacity(k_users);
    let mut phi_inv = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let phi = filters::interference_cov(channels, precoders, k)?;
        let g = channels.h(k, k) * &precoders[k];
        let total = &phi + &g * g.adjoint();
        j_inv.push(linalg::hpd_inverse(&total, "received-signal covariance")?);
        phi_inv.push(linalg::hpd_inverse(&phi, "interference covariance")?);
    }
    let grads = (0..k_users)
        .map(|j| {
            let mut acc = linalg::zeros(precoders[j].nrows(), precoders[j].ncols());
            for (k, m) in mu.as_slice().iter().enumerate() {
                let h = channels.h(k, j);
                let hv = h * &precoders[j];
                let mut term = h.adjoint() * &j_inv[k] * &hv;
                if k != j {
                    term -= h.adjoint() * &phi_inv[k] * &hv;
                }
                acc += term.scale(*m);
            }
            acc.scale(2.0 / LN_2)
        })
        .collect();
    Ok(grads)
}

/// Central finite-difference gradient of the weighted sum rate over the real
/// and imaginary parts of every precoder entry.
pub fn wsr_gradient_fd(channels: &ChannelSet, precoders: &[CMat], mu: &RateWeights, step: f64) -> Result<Vec<CMat>> {
    let mut v = precoders.to_vec();
    let mut grads = Vec::with_capacity(v.len());
    for j in 0..v.len() {
        let mut g = linalg::zeros(v[j].nrows(), v[j].ncols());
        for idx in 0..v[j].len() {
            let orig = v[j][idx];
            let mut partial = [0.0; 2];
            for (slot, dir) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                v[j][idx] = orig + dir * step;
                let plus = optimizer::weighted_sum_rate(channels, &v, mu)?;
                v[j][idx] = orig - dir * step;
                let minus = optimizer::weighted_sum_rate(channels, &v, mu)?;
                partial[slot] = (plus - minus) / (2.0 * step);
            }
            v[j][idx] = orig;
            g[idx] = C64::new(partial[0], partial[1]);
        }
        grads.push(g);
    }
    Ok(grads)
}

/// Radially rescales the precoders onto the power constraint.
pub fn project_onto_constraint(precoders: &mut [CMat], constraint: &PowerConstraint) -> Result<()> {
    match constraint {
        PowerConstraint::SumPower(p_t) => {
            let total: f64 = precoders.iter().map(linalg::power).sum();
            if total == 0.0 {
                return Err(Error::Degenerate("cannot project all-zero precoders".into()));
            }
            let s = (p_t / total).sqrt();
            precoders.iter_mut().for_each(|v| *v = v.scale(s));
        }
        PowerConstraint::PerNode(budgets) => {
            for (v, p) in precoders.iter_mut().zip(budgets) {
                let pw = linalg::power(v);
                if pw == 0.0 {
                    return Err(Error::Degenerate("cannot project a zero precoder".into()));
                }
                *v = v.scale((p / pw).sqrt());
            }
        }
    }
    Ok(())
}

/// Projected gradient ascent on the weighted sum rate.
pub fn projected_gradient_wsr(
    channels: &ChannelSet,
    mu: &RateWeights,
    constraint: &PowerConstraint,
    cfg: &GradientConfig,
) -> Result<(Vec<CMat>, GradientTrace)> {
    cfg.validate()?;
    constraint.validate(channels.k())?;
    if mu.len() != channels.k() {
        return Err(Error::InvalidParameter(format!("{} rate weights for K = {}", mu.len(), channels.k())));
    }
    let mut v = optimizer::initialize_precoders(channels, constraint, cfg.init)?;
    let mut current = optimizer::weighted_sum_rate(channels, &v, mu)?;
    let mut trace = GradientTrace { wsr: vec![current], ..Default::default() };
    let mut step = cfg.initial_step;

    for it in 1..=cfg.outer_iters {
        let grad = match cfg.mode {
            GradientMode::Analytic => wsr_gradient(channels, &v, mu)?,
            GradientMode::FiniteDifference => wsr_gradient_fd(channels, &v, mu, 1e-6)?,
        };
        let gnorm: f64 = grad.iter().map(linalg::power).sum::<f64>().sqrt();
        if !gnorm.is_finite() {
            return Err(Error::NonFinite(format!("gradient norm at iteration {it}")));
        }
        trace.iterations = it;
        if gnorm == 0.0 {
            trace.converged = true;
            break;
        }
        let vnorm: f64 = v.iter().map(linalg::power).sum::<f64>().sqrt();
        let scale = vnorm / gnorm;

        let mut accepted = None;
        for _ in 0..cfg.max_step_trials {
            trace.step_trials += 1;
            let mut cand: Vec<CMat> = v.iter().zip(&grad).map(|(x, g)| x + g.scale(step * scale)).collect();
            project_onto_constraint(&mut cand, constraint)?;
            let r = optimizer::weighted_sum_rate(channels, &cand, mu)?;
            if r > current {
                accepted = Some((cand, r));
                break;
            }
            step *= cfg.shrink;
        }
        let Some((cand, r)) = accepted else {
            trace.converged = true;
            break;
        };
        let gain = r - current;
        v = cand;
        current = r;
        trace.wsr.push(r);
        // Let the step recover after successful iterations.
        step = (step / cfg.shrink).min(1.0);
        if gain < cfg.epsilon {
            trace.converged = true;
            break;
        }
    }
    Ok((v, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channels, NetworkDims};
    use crate::rng::complex_gaussian_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        for seed in 0..10 {
            let dims = NetworkDims::new(2, 2, 2, 1).unwrap();
            let h = generate_channels(dims, 2.0, seed).unwrap();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<_> = (0..2).map(|_| complex_gaussian_matrix(&mut r, 2, 1, 1.0)).collect();
            let mu = RateWeights::new(vec![1.0, 0.6]).unwrap();
            let a = wsr_gradient(&h, &v, &mu).unwrap();
            let f = wsr_gradient_fd(&h, &v, &mu, 1e-5).unwrap();
            let num: f64 = a.iter().zip(&f).map(|(x, y)| linalg::power(&(x - y))).sum::<f64>().sqrt();
            let den: f64 = a.iter().map(linalg::power).sum::<f64>().sqrt();
            assert!(num / den < 1e-5, "seed {seed}: {}", num / den);
        }
    }

    #[test]
    fn single_user_scalar_gradient_reaches_capacity() {
        let dims = NetworkDims::new(1, 1, 1, 1).unwrap();
        let h = ChannelSet::from_matrices(dims, 1.0, vec![CMat::from_element(1, 1, C64::new(0.8, -0.6))]).unwrap();
        let (v, trace) = projected_gradient_wsr(
            &h,
            &RateWeights::equal(1),
            &PowerConstraint::PerNode(vec![1.0]),
            &GradientConfig::default(),
        )
        .unwrap();
        assert!((v[0][(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((trace.wsr.last().unwrap() - 2f64.log2()).abs() < 1e-4);
    }

    #[test]
    fn backtracking_never_decreases_and_projection_is_exact() {
        let dims = NetworkDims::new(3, 3, 3, 1).unwrap();
        let h = generate_channels(dims, 10.0, 3).unwrap();
        let mu = RateWeights::equal(3);
        for c in [PowerConstraint::SumPower(3.0), PowerConstraint::PerNode(vec![1.0; 3])] {
            let (v, trace) = projected_gradient_wsr(&h, &mu, &c, &GradientConfig::default()).unwrap();
            assert!(trace.wsr.windows(2).all(|w| w[1] >= w[0]));
            match &c {
                PowerConstraint::SumPower(p) => {
                    assert!((v.iter().map(linalg::power).sum::<f64>() - p).abs() < 1e-12)
                }
                PowerConstraint::PerNode(ps) => {
                    for (x, p) in v.iter().zip(ps) {
                        assert!((linalg::power(x) - p).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn simple_mmse_decreases_sum_mse() {
        for seed in 0..10 {
            let dims = NetworkDims::new(3, 3, 3, 2).unwrap();
            let h = generate_channels(dims, 10.0, seed).unwrap();
            let mu = RateWeights::equal(3);
            let cfg = OptimizerConfig { epsilon: 1e-9, max_iters: 50, ..Default::default() };
            for c in [PowerConstraint::SumPower(3.0), PowerConstraint::PerNode(vec![1.0; 3])] {
                let (_, trace) = simple_mmse_run(&h, &mu, &c, &cfg).unwrap();
                for w in trace.sum_mse.windows(2) {
                    assert!(w[1] <= w[0] + 1e-8, "seed {seed}: {} -> {}", w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn simple_mmse_zero_channels() {
        let dims = NetworkDims::new(2, 2, 2, 1).unwrap();
        let h = ChannelSet::zeros(dims).unwrap();
        let (state, trace) = simple_mmse_run(
            &h,
            &RateWeights::equal(2),
            &PowerConstraint::PerNode(vec![1.0; 2]),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.best_wsr(), 0.0);
        assert_eq!(optimizer::weighted_sum_rate(&h, &state.precoders, &RateWeights::equal(2)).unwrap(), 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = GradientConfig { shrink: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = GradientConfig { outer_iters: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
