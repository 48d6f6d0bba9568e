//! Nominal (perfect-CSI) weighted-MMSE filter algebra.
//!
//! With `G_k = H_kk V_k` and the interference-plus-noise covariance
//! `Φ_k = I_N + Σ_{i≠k} H_ki V_i V_iᴴ H_kiᴴ`:
//!
//! ```text
//! U_k = V_kᴴ H_kkᴴ (Φ_k + G_k G_kᴴ)⁻¹                 MMSE receiver (d × N)
//! E_k = (I_d + G_kᴴ Φ_k⁻¹ G_k)⁻¹                      MMSE error matrix (d × d)
//! R_k = log2 det(I_N + Φ_k⁻¹ G_k G_kᴴ) = log2 det E_k⁻¹
//! W_k = μ_k / ln 2 · E_k⁻¹
//! ```
//!
//! The transmit side solves `(Ψ_k + c I_M) V_k = H_kkᴴ U_kᴴ W_k` with
//! `Ψ_k = Σ_i H_ikᴴ U_iᴴ W_i U_i H_ik`, where `c` is either the closed-form
//! sum-power loading (followed by a common rescale) or a per-node Lagrange
//! multiplier found by bisection.
//!
//! The robust variants in [`crate::robust`] reuse the `*_loaded` helpers here
//! with a nonzero diagonal loading; nominal calls pass zero.

use std::f64::consts::LN_2;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{self, add_diag, identity, zeros, CMat, C64};
use crate::rng::{self, Purpose};

/// Rate weights `μ_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateWeights(Vec<f64>);

impl RateWeights {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidParameter("rate weights must not be empty".into()));
        }
        if let Some(bad) = mu.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter(format!("rate weight {bad} is not strictly positive")));
        }
        Ok(Self(mu))
    }

    pub fn equal(k: usize) -> Self {
        Self(vec![1.0; k])
    }

    /// `μ_1 = first`, `μ_k = rest` for `k > 1`.
    pub fn favor_first(k: usize, first: f64, rest: f64) -> Result<Self> {
        let mut mu = vec![rest; k];
        mu[0] = first;
        Self::new(mu)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|m| m * c).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerConstraint {
    /// `Σ_k Tr(V_k V_kᴴ) = P_T`.
    SumPower(f64),
    /// `Tr(V_k V_kᴴ) = P_k` for every `k`.
    PerNode(Vec<f64>),
}

impl PowerConstraint {
    pub fn validate(&self, k: usize) -> Result<()> {
        let ok = |p: f64| p > 0.0 && p.is_finite();
        match self {
            Self::SumPower(p) if ok(*p) => Ok(()),
            Self::SumPower(p) => Err(Error::InvalidParameter(format!("sum power {p} must be positive"))),
            Self::PerNode(p) if p.len() != k => Err(Error::InvalidParameter(format!(
                "per-node constraint has {} budgets for K = {k}",
                p.len()
            ))),
            Self::PerNode(p) => match p.iter().find(|x| !ok(**x)) {
                Some(bad) => Err(Error::InvalidParameter(format!("per-node power {bad} must be positive"))),
                None => Ok(()),
            },
        }
    }

    /// Power assigned to user `k` by an equal-split initialization.
    pub fn initial_power(&self, k: usize, users: usize) -> f64 {
        match self {
            Self::SumPower(p) => p / users as f64,
            Self::PerNode(p) => p[k],
        }
    }

    pub fn is_sum(&self) -> bool {
        matches!(self, Self::SumPower(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::SumPower(_) => "sum",
            Self::PerNode(_) => "pernode",
        }
    }
}

/// Precoders `V_k` (M × d), receivers `U_k` (d × N) and MSE weights `W_k`
/// (d × d) for every user.
#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverState {
    pub precoders: Vec<CMat>,
    pub receivers: Vec<CMat>,
    pub weights: Vec<CMat>,
}

impl TransceiverState {
    pub fn total_power(&self) -> f64 {
        self.precoders.iter().map(linalg::power).sum()
    }
}

fn check_precoders(channels: &ChannelSet, precoders: &[CMat]) -> Result<()> {
    let dims = channels.dims();
    if precoders.len() != dims.k {
        return Err(Error::InvalidDimensions(format!(
            "{} precoders for K = {}",
            precoders.len(),
            dims.k
        )));
    }
    if let Some(v) = precoders.iter().find(|v| v.nrows() != dims.m || v.ncols() != dims.d) {
        return Err(Error::InvalidDimensions(format!(
            "precoder shape {:?}, expected ({}, {})",
            v.shape(),
            dims.m,
            dims.d
        )));
    }
    Ok(())
}

fn check_receivers(channels: &ChannelSet, receivers: &[CMat], weights: &[CMat]) -> Result<()> {
    let dims = channels.dims();
    if receivers.len() != dims.k || weights.len() != dims.k {
        return Err(Error::InvalidDimensions(format!(
            "{} receivers / {} weights for K = {}",
            receivers.len(),
            weights.len(),
            dims.k
        )));
    }
    for (u, w) in receivers.iter().zip(weights) {
        if u.shape() != (dims.d, dims.n) || w.shape() != (dims.d, dims.d) {
            return Err(Error::InvalidDimensions(format!(
                "receiver {:?} / weight {:?}, expected ({d}, {}) / ({d}, {d})",
                u.shape(),
                w.shape(),
                dims.n,
                d = dims.d
            )));
        }
    }
    Ok(())
}

/// `Φ_k + loading · I_N`.
pub(crate) fn interference_cov_loaded(
    channels: &ChannelSet,
    precoders: &[CMat],
    k: usize,
    loading: f64,
) -> Result<CMat> {
    channels.check_user(k)?;
    check_precoders(channels, precoders)?;
    let n = channels.dims().n;
    let mut phi = identity(n);
    for (i, v) in precoders.iter().enumerate() {
        if i != k {
            let g = channels.h(k, i) * v;
            phi += &g * g.adjoint();
        }
    }
    Ok(add_diag(&linalg::hermitian_part(&phi), loading))
}

/// `Φ_k = I_N + Σ_{i≠k} H_ki V_i V_iᴴ H_kiᴴ`.
pub fn interference_cov(channels: &ChannelSet, precoders: &[CMat], k: usize) -> Result<CMat> {
    interference_cov_loaded(channels, precoders, k, 0.0)
}

pub(crate) fn receiver_loaded(channels: &ChannelSet, precoders: &[CMat], k: usize, loading: f64) -> Result<CMat> {
    let phi = interference_cov_loaded(channels, precoders, k, loading)?;
    let g = channels.h(k, k) * &precoders[k];
    let total = phi + &g * g.adjoint();
    // U = Gᴴ J⁻¹  ⇔  J Uᴴ = G
    Ok(linalg::hpd_solve(&total, &g, "received-signal covariance")?.adjoint())
}

/// MMSE receive filter `U_k = V_kᴴ H_kkᴴ (Σ_i H_ki V_i V_iᴴ H_kiᴴ + I_N)⁻¹`.
pub fn mmse_receiver(channels: &ChannelSet, precoders: &[CMat], k: usize) -> Result<CMat> {
    receiver_loaded(channels, precoders, k, 0.0)
}

pub(crate) fn error_covariance_loaded(
    channels: &ChannelSet,
    precoders: &[CMat],
    k: usize,
    loading: f64,
) -> Result<CMat> {
    let phi = interference_cov_loaded(channels, precoders, k, loading)?;
    let g = channels.h(k, k) * &precoders[k];
    let snr = g.adjoint() * linalg::hpd_solve(&phi, &g, "interference covariance")?;
    linalg::hpd_inverse(&(identity(g.ncols()) + snr), "I + GᴴΦ⁻¹G")
}

/// The `d × d` MMSE error matrix `E_k = (I_d + V_kᴴH_kkᴴ Φ_k⁻¹ H_kkV_k)⁻¹`.
pub fn error_covariance(channels: &ChannelSet, precoders: &[CMat], k: usize) -> Result<CMat> {
    error_covariance_loaded(channels, precoders, k, 0.0)
}

/// MSE matrix `E[(U y_k − s_k)(U y_k − s_k)ᴴ]` for an arbitrary receiver `U`.
pub fn mse_matrix(channels: &ChannelSet, precoders: &[CMat], receiver: &CMat, k: usize) -> Result<CMat> {
    channels.check_user(k)?;
    check_precoders(channels, precoders)?;
    let d = channels.dims().d;
    let direct = identity(d) - receiver * channels.h(k, k) * &precoders[k];
    let mut e = &direct * direct.adjoint() + receiver * receiver.adjoint();
    for (i, v) in precoders.iter().enumerate() {
        if i != k {
            let a = receiver * channels.h(k, i) * v;
            e += &a * a.adjoint();
        }
    }
    Ok(linalg::hermitian_part(&e))
}

/// Monte Carlo estimate of `E‖U_k y_k − s_k‖²` from transmitted unit-variance
/// Gaussian symbols and unit-variance noise.
pub fn empirical_mse(
    channels: &ChannelSet,
    precoders: &[CMat],
    receivers: &[CMat],
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    channels.check_user(k)?;
    check_precoders(channels, precoders)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("empirical_mse needs at least one trial".into()));
    }
    let dims = channels.dims();
    let u = &receivers[k];
    if u.shape() != (dims.d, dims.n) {
        return Err(Error::InvalidDimensions(format!("receiver shape {:?}", u.shape())));
    }
    let links: Vec<CMat> = (0..dims.k).map(|i| channels.h(k, i) * &precoders[i]).collect();
    let mut r = rng::stream(seed, Purpose::Symbols, k as u64);
    let mut acc = 0.0;
    for _ in 0..trials {
        let mut y = rng::complex_gaussian_matrix(&mut r, dims.n, 1, 1.0);
        let mut s_k = zeros(dims.d, 1);
        for (i, link) in links.iter().enumerate() {
            let s = rng::complex_gaussian_matrix(&mut r, dims.d, 1, 1.0);
            y += link * &s;
            if i == k {
                s_k = s;
            }
        }
        acc += linalg::power(&(u * y - s_k));
    }
    Ok(acc / trials as f64)
}

pub(crate) fn rate_loaded(channels: &ChannelSet, precoders: &[CMat], k: usize, loading: f64) -> Result<f64> {
    let phi = interference_cov_loaded(channels, precoders, k, loading)?;
    let g = channels.h(k, k) * &precoders[k];
    let total = &phi + &g * g.adjoint();
    // det(I + Φ⁻¹GGᴴ) = det(Φ + GGᴴ) / det Φ
    let ln = linalg::hpd_ln_det(&total, "received-signal covariance")?
        - linalg::hpd_ln_det(&phi, "interference covariance")?;
    Ok((ln / LN_2).max(0.0))
}

/// `R_k = log2 det(I_N + Φ_k⁻¹ H_kk V_k V_kᴴ H_kkᴴ)` in bits per channel use.
pub fn achievable_rate(channels: &ChannelSet, precoders: &[CMat], k: usize) -> Result<f64> {
    rate_loaded(channels, precoders, k, 0.0)
}

/// `log2 det(E⁻¹)` for a Hermitian PD error matrix.
pub fn rate_from_error(error: &CMat) -> Result<f64> {
    Ok(-linalg::hpd_ln_det(error, "error covariance")? / LN_2)
}

/// `W_k = μ_k / ln 2 · E_k⁻¹`.
pub fn mse_weights(errors: &[CMat], mu: &RateWeights) -> Result<Vec<CMat>> {
    if errors.len() != mu.len() {
        return Err(Error::InvalidDimensions(format!(
            "{} error matrices for {} rate weights",
            errors.len(),
            mu.len()
        )));
    }
    errors
        .iter()
        .zip(mu.as_slice())
        .map(|(e, m)| {
            if !(linalg::min_eigenvalue(e) > 0.0) {
                return Err(Error::NotPositiveDefinite("error covariance"));
            }
            Ok(linalg::hpd_inverse(e, "error covariance")?.scale(m / LN_2))
        })
        .collect()
}

/// `Ψ_k = Σ_i H_ikᴴ U_iᴴ W_i U_i H_ik`.
pub fn transmit_gram(channels: &ChannelSet, receivers: &[CMat], weights: &[CMat], k: usize) -> Result<CMat> {
    channels.check_user(k)?;
    check_receivers(channels, receivers, weights)?;
    let m = channels.dims().m;
    let mut psi = zeros(m, m);
    for (i, (u, w)) in receivers.iter().zip(weights).enumerate() {
        let a = u * channels.h(i, k);
        psi += a.adjoint() * w * a;
    }
    Ok(linalg::hermitian_part(&psi))
}

/// `H_kkᴴ U_kᴴ W_k`.
pub(crate) fn transmit_rhs(channels: &ChannelSet, receivers: &[CMat], weights: &[CMat], k: usize) -> CMat {
    channels.h(k, k).adjoint() * receivers[k].adjoint() * &weights[k]
}

/// `Σ_i Tr(W_i U_i U_iᴴ)`.
pub(crate) fn weighted_receiver_trace(receivers: &[CMat], weights: &[CMat]) -> f64 {
    receivers
        .iter()
        .zip(weights)
        .map(|(u, w)| linalg::trace_re(&(w * u * u.adjoint())))
        .sum()
}

/// Sum-power precoders and the common scale `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumPowerSolution {
    pub precoders: Vec<CMat>,
    pub beta: f64,
}

pub(crate) fn sum_power_precoders_loaded(
    channels: &ChannelSet,
    receivers: &[CMat],
    weights: &[CMat],
    p_t: f64,
    extra_loading: f64,
) -> Result<SumPowerSolution> {
    check_receivers(channels, receivers, weights)?;
    if !(p_t > 0.0 && p_t.is_finite()) {
        return Err(Error::InvalidParameter(format!("sum power {p_t} must be positive")));
    }
    let k_users = channels.k();
    let rhs: Vec<CMat> = (0..k_users).map(|k| transmit_rhs(channels, receivers, weights, k)).collect();
    if rhs.iter().all(|r| r.iter().all(|z| *z == C64::new(0.0, 0.0))) {
        return Err(Error::Degenerate("every H_kkᴴU_kᴴW_k is zero; β is undefined".into()));
    }
    let loading = weighted_receiver_trace(receivers, weights) / p_t + extra_loading;
    let mut unscaled = Vec::with_capacity(k_users);
    for (k, b) in rhs.iter().enumerate() {
        let psi = transmit_gram(channels, receivers, weights, k)?;
        unscaled.push(linalg::hpd_solve(&add_diag(&psi, loading), b, "regularized transmit Gram")?);
    }
    let total: f64 = unscaled.iter().map(linalg::power).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Degenerate(format!("unscaled precoder power {total}; β is undefined")));
    }
    let beta = (p_t / total).sqrt();
    Ok(SumPowerSolution {
        precoders: unscaled.into_iter().map(|v| v.scale(beta)).collect(),
        beta,
    })
}

/// Closed-form sum-power WMMSE precoders, scaled so `Σ_k Tr(V_k V_kᴴ) = P_T`.
pub fn sum_power_precoders(
    channels: &ChannelSet,
    receivers: &[CMat],
    weights: &[CMat],
    p_t: f64,
) -> Result<SumPowerSolution> {
    sum_power_precoders_loaded(channels, receivers, weights, p_t, 0.0)
}

/// Transmit power of `V(λ) = (Ψ + λI)⁻¹ B` in the eigenbasis of `Ψ`:
/// `Σ_i [QᴴBBᴴQ]_ii / (σ_i + λ)²`.
#[derive(Debug, Clone)]
pub(crate) struct PowerProfile {
    sigma: Vec<f64>,
    pi: Vec<f64>,
    q: CMat,
    qh_rhs: CMat,
    null_floor: f64,
    pi_floor: f64,
}

impl PowerProfile {
    pub(crate) fn new(psi: &CMat, rhs: &CMat) -> Result<Self> {
        if psi.nrows() != psi.ncols() || psi.nrows() != rhs.nrows() {
            return Err(Error::InvalidDimensions(format!(
                "Ψ {:?} incompatible with right-hand side {:?}",
                psi.shape(),
                rhs.shape()
            )));
        }
        let (sigma, q) = linalg::hermitian_eigen(psi);
        let sigma: Vec<f64> = sigma.into_iter().map(|s| s.max(0.0)).collect();
        let qh_rhs = q.adjoint() * rhs;
        let pi: Vec<f64> = qh_rhs.row_iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect();
        let smax = sigma.iter().copied().fold(0.0, f64::max);
        let pi_total: f64 = pi.iter().sum();
        Ok(Self {
            sigma,
            pi,
            q,
            qh_rhs,
            null_floor: 1e-12 * smax,
            pi_floor: 1e-20 * pi_total,
        })
    }

    /// At `λ = 0`, eigen-directions of `Ψ` with (numerically) zero eigenvalue
    /// contribute nothing when `B` has no component there (pseudo-inverse
    /// limit) and infinite power otherwise.
    fn null_direction(&self, i: usize, lambda: f64) -> bool {
        lambda == 0.0 && self.sigma[i] <= self.null_floor
    }

    pub(crate) fn power(&self, lambda: f64) -> f64 {
        let mut p = 0.0;
        for i in 0..self.sigma.len() {
            if self.null_direction(i, lambda) {
                if self.pi[i] > self.pi_floor {
                    return f64::INFINITY;
                }
                continue;
            }
            let den = self.sigma[i] + lambda;
            p += self.pi[i] / (den * den);
        }
        p
    }

    pub(crate) fn precoder(&self, lambda: f64) -> CMat {
        let mut scaled = self.qh_rhs.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            let f = if self.null_direction(i, lambda) { 0.0 } else { 1.0 / (self.sigma[i] + lambda) };
            row.scale_mut(f);
        }
        &self.q * scaled
    }

    fn rhs_is_zero(&self) -> bool {
        self.pi.iter().all(|p| *p == 0.0)
    }
}

/// `Tr(V(λ) V(λ)ᴴ)` for `V(λ) = (Ψ + λ I)⁻¹ B`.
pub fn per_node_power(psi: &CMat, rhs: &CMat, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("λ = {lambda} must be nonnegative")));
    }
    Ok(PowerProfile::new(psi, rhs)?.power(lambda))
}

/// Outcome of a per-node multiplier search.
#[derive(Debug, Clone, PartialEq)]
pub struct PerNodeSolution {
    pub precoder: CMat,
    pub lambda: f64,
    pub power: f64,
    /// `λ = 0` already gave less than the budget; the constraint is inactive.
    pub clamped: bool,
    pub iterations: usize,
}

/// Bisection iteration cap.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Finds `λ ≥ 0` with `|Tr(V(λ)V(λ)ᴴ) − P| / P ≤ tol`, relying on the power
/// being non-increasing in `λ`.
pub(crate) fn solve_multiplier(profile: &PowerProfile, budget: f64, tol: f64) -> Result<PerNodeSolution> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("per-node power {budget} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("bisection tolerance {tol} must be positive")));
    }
    if profile.rhs_is_zero() {
        return Err(Error::Degenerate("H_kkᴴU_kᴴW_k is zero; no λ yields positive power".into()));
    }
    let rel = |p: f64| (p - budget) / budget;
    let done = |lambda: f64, power: f64, clamped: bool, iterations: usize| PerNodeSolution {
        precoder: profile.precoder(lambda),
        lambda,
        power,
        clamped,
        iterations,
    };

    let p0 = profile.power(0.0);
    if rel(p0) <= tol {
        let clamped = rel(p0) < -tol;
        if clamped {
            log::debug!("per-node power {p0:.6e} below budget {budget:.6e} at λ = 0; clamping");
        }
        return Ok(done(0.0, p0, clamped, 0));
    }

    let mut hi = 1.0;
    let mut expansions = 0;
    while profile.power(hi) >= budget {
        hi *= 2.0;
        expansions += 1;
        if !hi.is_finite() {
            return Err(Error::NonFinite("λ bracket expansion overflowed".into()));
        }
    }
    let mut lo = 0.0;
    let mut best = (hi, profile.power(hi));
    for it in 1..=MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        let p = profile.power(mid);
        if rel(p).abs() < rel(best.1).abs() {
            best = (mid, p);
        }
        if rel(p).abs() <= tol {
            return Ok(done(mid, p, false, expansions + it));
        }
        if p > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    log::warn!(
        "per-node bisection stopped at relative power error {:.3e} (tol {tol:.1e})",
        rel(best.1)
    );
    Ok(done(best.0, best.1, false, expansions + MAX_BISECTION_ITERS))
}

/// Solves for `λ` directly from `Ψ` and `B`, as the per-node precoder does.
pub fn solve_per_node_multiplier(psi: &CMat, rhs: &CMat, budget: f64, tol: f64) -> Result<PerNodeSolution> {
    solve_multiplier(&PowerProfile::new(psi, rhs)?, budget, tol)
}

pub(crate) fn per_node_precoder_loaded(
    channels: &ChannelSet,
    receivers: &[CMat],
    weights: &[CMat],
    k: usize,
    p_k: f64,
    tol: f64,
    extra_loading: f64,
) -> Result<PerNodeSolution> {
    let psi = add_diag(&transmit_gram(channels, receivers, weights, k)?, extra_loading);
    let rhs = transmit_rhs(channels, receivers, weights, k);
    solve_multiplier(&PowerProfile::new(&psi, &rhs)?, p_k, tol)
}

/// Per-node WMMSE precoder `V_k = (Ψ_k + λ_k I_M)⁻¹ H_kkᴴ U_kᴴ W_k`.
pub fn per_node_precoder(
    channels: &ChannelSet,
    receivers: &[CMat],
    weights: &[CMat],
    k: usize,
    p_k: f64,
    tol: f64,
) -> Result<PerNodeSolution> {
    per_node_precoder_loaded(channels, receivers, weights, k, p_k, tol, 0.0)
}
