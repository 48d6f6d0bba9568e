//! Weighted-MMSE transceiver design for the K-user MIMO interference channel.
//!
//! Every transmitter `k` sends `d` streams through a precoder `V_k` (`M × d`)
//! and every receiver recovers them with a linear filter `U_k` (`d × N`).
//! The crate maximizes the weighted sum rate `Σ μ_k R_k` by alternating
//! between MMSE receivers, MSE weights and precoders, under either a total
//! power budget or one budget per transmitter, optionally accounting for
//! Gaussian channel-estimation errors.
//!
//! * [`channel`]: Rayleigh channel draws and mismatch injection.
//! * [`filters`]: receivers, error covariances, rates, weights, precoders.
//! * [`robust`]: the same filters averaged over channel errors.
//! * [`optimizer`]: the alternating loop.
//! * [`baselines`]: unweighted MMSE and projected gradient ascent.
//! * [`complexity`]: closed-form operation counts and feedback amounts.
//! * [`experiment`]: Monte Carlo SNR sweeps and CSV output.
//! * [`validate`]: numerical self-checks.
//!
//! Conventions: `H_ji` (`N × M`) is the link from transmitter `i` to
//! receiver `j`, noise is unit variance and rates are in bits.

pub mod baselines;
pub mod channel;
pub mod complexity;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod linalg;
pub mod optimizer;
pub mod rng;
pub mod robust;
pub mod validate;

pub use channel::{apply_mismatch, generate_channels, snr_to_sigma_h, ChannelSet, MismatchedChannels, NetworkDims};
pub use error::{Error, Result};
pub use filters::{PowerConstraint, RateWeights, TransceiverState};
pub use linalg::{CMat, C64};
pub use optimizer::{run_algorithm1, weighted_sum_rate, InitStrategy, OptimizerConfig, OptimizerTrace};
pub use robust::RobustContext;
