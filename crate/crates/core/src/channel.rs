//! Channel realizations for the K-user MIMO interference channel.
//!
//! Entry `(j, i)` of a [`ChannelSet`] is `H_ji`, the `N × M` link from source
//! `i` to destination `j`. Elements are i.i.d. circularly-symmetric complex
//! Gaussian; a total variance `σ²` means `σ²/2` per real component. The noise
//! variance at every receiver is fixed at 1.

use crate::error::{Error, Result};
use crate::linalg::{CMat, zeros};
use crate::rng::{self, Purpose};

/// `K` user pairs, `M` transmit and `N` receive antennas, `d` streams per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkDims {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub d: usize,
}

impl NetworkDims {
    pub fn new(k: usize, m: usize, n: usize, d: usize) -> Result<Self> {
        let dims = Self { k, m, n, d };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 || self.n == 0 || self.d == 0 {
            return Err(Error::InvalidDimensions(format!(
                "all of K, M, N, d must be positive (got {self:?})"
            )));
        }
        if self.d > self.m.min(self.n) {
            return Err(Error::InvalidDimensions(format!(
                "d = {} exceeds min(M, N) = {}",
                self.d,
                self.m.min(self.n)
            )));
        }
        Ok(())
    }

    /// Whether the configuration passes the usual linear-IA feasibility
    /// heuristic `M + N ≥ (K + 1) d`. Only used to warn.
    pub fn dof_feasible(&self) -> bool {
        self.m + self.n >= (self.k + 1) * self.d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    dims: NetworkDims,
    sigma_h_sq: f64,
    entries: Vec<CMat>,
}

impl ChannelSet {
    /// Builds a channel set from `K²` matrices in row-major link order
    /// (`entries[j * K + i] = H_ji`).
    pub fn from_matrices(dims: NetworkDims, sigma_h_sq: f64, entries: Vec<CMat>) -> Result<Self> {
        dims.validate()?;
        if entries.len() != dims.k * dims.k {
            return Err(Error::InvalidDimensions(format!(
                "expected {} channel matrices, got {}",
                dims.k * dims.k,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|h| h.shape() != (dims.n, dims.m)) {
            return Err(Error::InvalidDimensions(format!(
                "channel matrix has shape {:?}, expected ({}, {})",
                bad.shape(),
                dims.n,
                dims.m
            )));
        }
        Ok(Self { dims, sigma_h_sq, entries })
    }

    /// Builds a channel set by evaluating `f(j, i)` for every link.
    pub fn from_fn(dims: NetworkDims, sigma_h_sq: f64, mut f: impl FnMut(usize, usize) -> CMat) -> Result<Self> {
        let entries = (0..dims.k * dims.k).map(|idx| f(idx / dims.k, idx % dims.k)).collect();
        Self::from_matrices(dims, sigma_h_sq, entries)
    }

    pub fn zeros(dims: NetworkDims) -> Result<Self> {
        Self::from_fn(dims, 0.0, |_, _| zeros(dims.n, dims.m))
    }

    pub fn dims(&self) -> NetworkDims {
        self.dims
    }

    pub fn k(&self) -> usize {
        self.dims.k
    }

    pub fn sigma_h_sq(&self) -> f64 {
        self.sigma_h_sq
    }

    /// `H_ji`: link from source `i` to destination `j`.
    pub fn h(&self, j: usize, i: usize) -> &CMat {
        &self.entries[j * self.dims.k + i]
    }

    pub fn h_mut(&mut self, j: usize, i: usize) -> &mut CMat {
        &mut self.entries[j * self.dims.k + i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMat> {
        self.entries.iter()
    }

    pub(crate) fn check_user(&self, k: usize) -> Result<()> {
        if k >= self.dims.k {
            return Err(Error::IndexOutOfRange { index: k, k: self.dims.k });
        }
        Ok(())
    }
}

/// True channels together with the estimates a transmitter designs from.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchedChannels {
    pub true_channels: ChannelSet,
    pub estimated_channels: ChannelSet,
    pub sigma_delta_sq: f64,
}

fn check_variance(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// Draws `K²` i.i.d. `CN(0, σ_h²)` channel matrices. Link `(j, i)` uses its own
/// random stream keyed on `seed`.
pub fn generate_channels(dims: NetworkDims, sigma_h_sq: f64, seed: u64) -> Result<ChannelSet> {
    dims.validate()?;
    check_variance("sigma_h_sq", sigma_h_sq)?;
    ChannelSet::from_fn(dims, sigma_h_sq, |j, i| {
        let mut r = rng::stream(seed, Purpose::Channel, (j * dims.k + i) as u64);
        rng::complex_gaussian_matrix(&mut r, dims.n, dims.m, sigma_h_sq)
    })
}

/// Produces `H̃ = H + Δ` with Δ i.i.d. `CN(0, σ_Δ²)`, independent across links
/// and drawn from streams disjoint from the channel streams.
pub fn apply_mismatch(channels: &ChannelSet, sigma_delta_sq: f64, seed: u64) -> Result<MismatchedChannels> {
    check_variance("sigma_delta_sq", sigma_delta_sq)?;
    let dims = channels.dims();
    let estimated = ChannelSet::from_fn(dims, channels.sigma_h_sq(), |j, i| {
        let h = channels.h(j, i);
        if sigma_delta_sq == 0.0 {
            return h.clone();
        }
        let mut r = rng::stream(seed, Purpose::Mismatch, (j * dims.k + i) as u64);
        h + rng::complex_gaussian_matrix(&mut r, dims.n, dims.m, sigma_delta_sq)
    })?;
    Ok(MismatchedChannels {
        true_channels: channels.clone(),
        estimated_channels: estimated,
        sigma_delta_sq,
    })
}

/// Channel variance for a given SNR with `P_T = K`, `P_k = 1` and unit noise:
/// `σ_h² = 10^(snr_db / 10)`.
pub fn snr_to_sigma_h(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
