//! Per-transmitter budgets: one multiplier search in detail, then the full
//! optimization with the per-user powers it lands on.

use wmmse_ic::filters::{per_node_power, solve_per_node_multiplier, transmit_gram};
use wmmse_ic::linalg;
use wmmse_ic::{
    generate_channels, run_algorithm1, snr_to_sigma_h, NetworkDims, OptimizerConfig, PowerConstraint, RateWeights,
};

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(3, 4, 4, 2)?;
    let channels = generate_channels(dims, snr_to_sigma_h(10.0), 11)?;
    let mu = RateWeights::equal(dims.k);
    let constraint = PowerConstraint::PerNode(vec![1.0, 0.5, 2.0]);

    let (state, trace) = run_algorithm1(&channels, &mu, &constraint, &OptimizerConfig::default(), None)?;
    println!("R = {:.4} after {} iterations, {} clamped updates", trace.best_wsr(), trace.iterations, trace.clamp_events);
    for (k, v) in state.precoders.iter().enumerate() {
        println!("user {k}: Tr(VVᴴ) = {:.8}", linalg::power(v));
    }

    // The multiplier for user 0 given the final receivers and weights.
    let psi = transmit_gram(&channels, &state.receivers, &state.weights, 0)?;
    let rhs = channels.h(0, 0).adjoint() * state.receivers[0].adjoint() * &state.weights[0];
    let sol = solve_per_node_multiplier(&psi, &rhs, 1.0, 1e-10)?;
    println!("user 0: λ = {:.6e} after {} bisection steps (clamped: {})", sol.lambda, sol.iterations, sol.clamped);
    for lambda in [0.0, sol.lambda / 2.0, sol.lambda, 2.0 * sol.lambda + 1e-3] {
        println!("  power(λ = {lambda:.4e}) = {:.6}", per_node_power(&psi, &rhs, lambda)?);
    }
    Ok(())
}
