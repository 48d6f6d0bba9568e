//! Filters for imperfect CSI.
//!
//! The designer sees `H̃ = H + Δ` with Δ i.i.d. `CN(0, σ_Δ²)`. Averaging the
//! MSE over Δ adds two diagonal loadings to the nominal algebra:
//!
//! * receive side: `σ_Δ² Σ_i Tr(V_i V_iᴴ) · I_N` inside the covariance,
//! * transmit side: `σ_Δ² Σ_i Tr(U_iᴴ W_i U_i) · I_M` inside the inverse.
//!
//! The trace of singular values of a PSD matrix equals its trace, so both
//! terms are computed without any decomposition. With `σ_Δ² = 0` every
//! function here returns exactly what its counterpart in
//! [`crate::filters`] returns.

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::filters::{self, PerNodeSolution, RateWeights, SumPowerSolution};
use crate::linalg::{self, CMat};

/// Estimated channels plus the mismatch variance the designer assumes
/// (`σ_Δ² + σ_ε²` when the variance is over-estimated).
#[derive(Debug, Clone, PartialEq)]
pub struct RobustContext {
    pub estimated_channels: ChannelSet,
    pub sigma_delta_sq_assumed: f64,
}

impl RobustContext {
    pub fn new(estimated_channels: ChannelSet, sigma_delta_sq_assumed: f64) -> Result<Self> {
        if !(sigma_delta_sq_assumed >= 0.0 && sigma_delta_sq_assumed.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "assumed mismatch variance {sigma_delta_sq_assumed} must be nonnegative"
            )));
        }
        Ok(Self { estimated_channels, sigma_delta_sq_assumed })
    }

    /// `σ_Δ² Σ_i Tr(Ṽ_i Ṽ_iᴴ)`.
    pub fn receive_loading(&self, precoders: &[CMat]) -> f64 {
        self.sigma_delta_sq_assumed * precoders.iter().map(linalg::power).sum::<f64>()
    }

    /// `σ_Δ² Σ_i Tr(Ũ_iᴴ W̃_i Ũ_i)`.
    pub fn transmit_loading(&self, receivers: &[CMat], weights: &[CMat]) -> f64 {
        self.sigma_delta_sq_assumed * filters::weighted_receiver_trace(receivers, weights)
    }
}

/// `Φ̃_k = I + Σ_{i≠k} H̃_ki Ṽ_i Ṽ_iᴴ H̃_kiᴴ + σ_Δ² Σ_i Tr(Ṽ_i Ṽ_iᴴ) I`.
pub fn robust_interference_cov(ctx: &RobustContext, precoders: &[CMat], k: usize) -> Result<CMat> {
    filters::interference_cov_loaded(&ctx.estimated_channels, precoders, k, ctx.receive_loading(precoders))
}

pub fn robust_receiver(ctx: &RobustContext, precoders: &[CMat], k: usize) -> Result<CMat> {
    filters::receiver_loaded(&ctx.estimated_channels, precoders, k, ctx.receive_loading(precoders))
}

/// `Ẽ_k` in its `d × d` form.
pub fn robust_error_covariance(ctx: &RobustContext, precoders: &[CMat], k: usize) -> Result<CMat> {
    filters::error_covariance_loaded(&ctx.estimated_channels, precoders, k, ctx.receive_loading(precoders))
}

/// Rate the designer believes user `k` gets, `log2 det Ẽ_k⁻¹`.
pub fn robust_rate(ctx: &RobustContext, precoders: &[CMat], k: usize) -> Result<f64> {
    filters::rate_loaded(&ctx.estimated_channels, precoders, k, ctx.receive_loading(precoders))
}

/// `W̃_k = μ_k / ln 2 · Ẽ_k⁻¹` for all users.
pub fn robust_weights(ctx: &RobustContext, precoders: &[CMat], mu: &RateWeights) -> Result<Vec<CMat>> {
    let errors = (0..ctx.estimated_channels.k())
        .map(|k| robust_error_covariance(ctx, precoders, k))
        .collect::<Result<Vec<_>>>()?;
    filters::mse_weights(&errors, mu)
}

pub fn robust_sum_power_precoders(
    ctx: &RobustContext,
    receivers: &[CMat],
    weights: &[CMat],
    p_t: f64,
) -> Result<SumPowerSolution> {
    filters::sum_power_precoders_loaded(
        &ctx.estimated_channels,
        receivers,
        weights,
        p_t,
        ctx.transmit_loading(receivers, weights),
    )
}

pub fn robust_per_node_precoder(
    ctx: &RobustContext,
    receivers: &[CMat],
    weights: &[CMat],
    k: usize,
    p_k: f64,
    tol: f64,
) -> Result<PerNodeSolution> {
    filters::per_node_precoder_loaded(
        &ctx.estimated_channels,
        receivers,
        weights,
        k,
        p_k,
        tol,
        ctx.transmit_loading(receivers, weights),
    )
}
