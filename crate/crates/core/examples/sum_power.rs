//! WMMSE under a total power budget; prints the ascent of the weighted sum rate.

use wmmse_ic::{
    generate_channels, run_algorithm1, snr_to_sigma_h, NetworkDims, OptimizerConfig, PowerConstraint, RateWeights,
};

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(4, 5, 5, 2)?;
    let channels = generate_channels(dims, snr_to_sigma_h(20.0), 7)?;
    let mu = RateWeights::equal(dims.k);
    let constraint = PowerConstraint::SumPower(dims.k as f64);

    let (state, trace) = run_algorithm1(&channels, &mu, &constraint, &OptimizerConfig::default(), None)?;
    for (l, r) in trace.wsr.iter().enumerate().filter(|(l, _)| l % 10 == 0) {
        println!("iter {l:3}  R = {r:.4} bit/s/Hz");
    }
    println!(
        "best R = {:.4} at iteration {} of {} (converged: {}), total power {:.6}",
        trace.best_wsr(),
        trace.best_iteration,
        trace.iterations,
        trace.converged,
        state.total_power()
    );
    Ok(())
}
