//! Designing from a noisy channel estimate, with and without accounting for
//! the estimation error. Both designs are scored on the true channels.

use wmmse_ic::{
    apply_mismatch, generate_channels, run_algorithm1, snr_to_sigma_h, weighted_sum_rate, NetworkDims,
    OptimizerConfig, PowerConstraint, RateWeights, RobustContext,
};

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(4, 5, 5, 2)?;
    let mu = RateWeights::equal(dims.k);
    let constraint = PowerConstraint::SumPower(dims.k as f64);
    let cfg = OptimizerConfig::default();
    let trials = 20;

    for snr in [0.0, 10.0, 20.0] {
        let sigma_h_sq = snr_to_sigma_h(snr);
        let (mut naive, mut robust) = (0.0, 0.0);
        for t in 0..trials {
            let channels = generate_channels(dims, sigma_h_sq, 100 + t)?;
            let est = apply_mismatch(&channels, 0.1 * sigma_h_sq, 500 + t)?;
            let (plain, _) = run_algorithm1(&est.estimated_channels, &mu, &constraint, &cfg, None)?;
            let ctx = RobustContext::new(est.estimated_channels.clone(), est.sigma_delta_sq)?;
            let (careful, _) = run_algorithm1(&est.estimated_channels, &mu, &constraint, &cfg, Some(&ctx))?;
            naive += weighted_sum_rate(&channels, &plain.precoders, &mu)?;
            robust += weighted_sum_rate(&channels, &careful.precoders, &mu)?;
        }
        let n = trials as f64;
        println!("{snr:4} dB  naive {:7.3}  robust {:7.3}  bit/s/Hz", naive / n, robust / n);
    }
    Ok(())
}
