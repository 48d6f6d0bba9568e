//! Draws a seeded interference channel and a mismatched estimate of it.

use wmmse_ic::{apply_mismatch, generate_channels, snr_to_sigma_h, NetworkDims};

fn main() -> wmmse_ic::Result<()> {
    let dims = NetworkDims::new(3, 4, 4, 2)?;
    let sigma_h_sq = snr_to_sigma_h(10.0);
    let channels = generate_channels(dims, sigma_h_sq, 42)?;
    println!("K={} M={} N={} d={}  σ_h²={sigma_h_sq:.3}  DoF-feasible: {}", dims.k, dims.m, dims.n, dims.d, dims.dof_feasible());

    let entries = (dims.m * dims.n) as f64;
    for j in 0..dims.k {
        let row: Vec<String> = (0..dims.k)
            .map(|i| format!("{:6.2}", channels.h(j, i).norm_squared() / entries))
            .collect();
        println!("rx {j}: mean |h|² per link {}", row.join(" "));
    }

    let mismatch = apply_mismatch(&channels, 0.1 * sigma_h_sq, 43)?;
    let err: f64 = mismatch
        .true_channels
        .iter()
        .zip(mismatch.estimated_channels.iter())
        .map(|(a, b)| (a - b).norm_squared())
        .sum();
    let count = (dims.k * dims.k) as f64 * entries;
    println!("estimate error variance {:.3} (target {:.3})", err / count, mismatch.sigma_delta_sq);
    Ok(())
}
