//! WMMSE against unweighted MMSE and projected gradient ascent on one draw.

use wmmse_ic::baselines::{projected_gradient_wsr, simple_mmse_run, GradientConfig};
use wmmse_ic::{
    generate_channels, run_algorithm1, snr_to_sigma_h, NetworkDims, OptimizerConfig, PowerConstraint, RateWeights,
};

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(4, 5, 5, 2)?;
    let mu = RateWeights::equal(dims.k);
    let cfg = OptimizerConfig::default();
    println!("{:>6} {:>9} {:>9} {:>9}", "snr", "wmmse", "mmse", "gradient");
    for snr in [0.0, 10.0, 20.0, 30.0] {
        let channels = generate_channels(dims, snr_to_sigma_h(snr), 3)?;
        let constraint = PowerConstraint::SumPower(dims.k as f64);
        let (_, w) = run_algorithm1(&channels, &mu, &constraint, &cfg, None)?;
        let (_, m) = simple_mmse_run(&channels, &mu, &constraint, &cfg)?;
        let (_, g) = projected_gradient_wsr(&channels, &mu, &constraint, &GradientConfig::default())?;
        let last = |v: &[f64]| v.last().copied().unwrap_or(0.0);
        println!("{snr:6} {:9.3} {:9.3} {:9.3}", w.best_wsr(), last(&m.wsr), last(&g.wsr));
    }
    Ok(())
}
