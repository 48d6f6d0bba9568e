//! Closed-form and first-order checks of the alternating optimizer and the
//! gradient baseline.

mod common;

use common::*;
use wmmse_ic::baselines::{projected_gradient_wsr, GradientConfig};
use wmmse_ic::filters::RateWeights;
use wmmse_ic::{
    generate_channels, linalg, run_algorithm1, ChannelSet, InitStrategy, NetworkDims, OptimizerConfig,
    PowerConstraint, RobustContext, C64,
};

fn largest_singular_sq(h: &wmmse_ic::CMat) -> f64 {
    (h.adjoint() * h).symmetric_eigenvalues().iter().copied().fold(0.0, f64::max)
}

#[test]
fn orthogonal_links_decouple_into_single_user_capacity() {
    let dims = NetworkDims::new(2, 2, 2, 1).unwrap();
    for seed in 0..20 {
        let base = generate_channels(dims, 3.0, seed).unwrap();
        let h = ChannelSet::from_fn(dims, 3.0, |j, i| {
            if i == j { base.h(j, i).clone() } else { linalg::zeros(2, 2) }
        })
        .unwrap();
        let mu = RateWeights::equal(2);
        // One stream at full power along the strongest right-singular vector.
        let expected: f64 = (0..2).map(|k| (1.0 + largest_singular_sq(h.h(k, k))).log2()).sum();
        for c in [PowerConstraint::PerNode(vec![1.0, 1.0]), PowerConstraint::SumPower(2.0)] {
            let (state, trace) = run_algorithm1(&h, &mu, &c, &OptimizerConfig::default(), None).unwrap();
            if c.is_sum() {
                // Sum power may move power between the users: at least as good.
                assert!(trace.best_wsr() >= expected - 1e-6);
            } else {
                assert!((trace.best_wsr() - expected).abs() < 1e-6, "seed {seed}: {} vs {expected}", trace.best_wsr());
                for v in &state.precoders {
                    assert!((v.norm_squared() - 1.0).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn single_user_scalar_reaches_capacity() {
    let dims = NetworkDims::new(1, 1, 1, 1).unwrap();
    let h = ChannelSet::from_fn(dims, 1.0, |_, _| wmmse_ic::CMat::from_element(1, 1, C64::new(1.0, 0.0))).unwrap();
    let (state, trace) =
        run_algorithm1(&h, &RateWeights::equal(1), &PowerConstraint::PerNode(vec![1.0]), &OptimizerConfig::default(), None)
            .unwrap();
    assert!((trace.best_wsr() - 1.0).abs() < 1e-4);
    assert!((state.precoders[0][(0, 0)].norm() - 1.0).abs() < 1e-6);
}

/// Removes the radial component of each gradient block that lies on an
/// active power sphere.
fn tangent_norm(v: &[wmmse_ic::CMat], grad: &[f64], constraint: &PowerConstraint) -> f64 {
    let blocks: Vec<Vec<f64>> = {
        let mut out = Vec::new();
        let mut offset = 0;
        for x in v {
            let len = 2 * x.len();
            out.push(grad[offset..offset + len].to_vec());
            offset += len;
        }
        out
    };
    let flat = |x: &wmmse_ic::CMat| x.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    match constraint {
        PowerConstraint::SumPower(_) => {
            let x: Vec<f64> = v.iter().flat_map(flat).collect();
            let c = dot(grad, &x) / dot(&x, &x);
            norm(&grad.iter().zip(&x).map(|(g, xi)| g - c * xi).collect::<Vec<_>>())
        }
        PowerConstraint::PerNode(budgets) => {
            let mut total = 0.0;
            for ((x, g), p) in v.iter().zip(&blocks).zip(budgets) {
                let x = flat(x);
                let active = (dot(&x, &x) - p).abs() <= 1e-6 * p;
                let c = if active { dot(g, &x) / dot(&x, &x) } else { 0.0 };
                total += g.iter().zip(&x).map(|(gi, xi)| (gi - c * xi).powi(2)).sum::<f64>();
            }
            total.sqrt()
        }
    }
}

#[test]
fn converged_points_are_stationary() {
    let config = OptimizerConfig { epsilon: 1e-10, max_iters: 5000, ..Default::default() };
    for seed in 0..12u64 {
        let k = 2 + (seed % 2) as usize;
        let m = 2 + (seed as usize / 2) % 2;
        let dims = NetworkDims::new(k, m, m, 1).unwrap();
        let h = generate_channels(dims, 3.0, 100 + seed).unwrap();
        let mu = RateWeights::new((0..k).map(|i| 1.0 + 0.3 * i as f64).collect()).unwrap();
        for c in [PowerConstraint::SumPower(k as f64), PowerConstraint::PerNode(vec![1.0; k])] {
            let (state, trace) = run_algorithm1(&h, &mu, &c, &config, None).unwrap();
            let g = fd_gradient(&state.precoders, 1e-6, |x| wsr(&h, x, mu.as_slice()));
            let t = tangent_norm(&state.precoders, &g, &c);
            assert!(t < 1e-3 * (1.0 + trace.best_wsr()), "seed {seed} {}: tangent gradient {t}", c.label());
        }
    }
}

#[test]
fn restarts_never_lose_to_a_single_run() {
    let dims = NetworkDims::new(3, 2, 2, 1).unwrap();
    let mu = RateWeights::equal(3);
    let c = PowerConstraint::PerNode(vec![1.0; 3]);
    for seed in 0..8 {
        let h = generate_channels(dims, 10.0, seed).unwrap();
        let (_, single) = run_algorithm1(&h, &mu, &c, &OptimizerConfig::default(), None).unwrap();
        let config = OptimizerConfig { restarts: 4, restart_seed: seed, ..Default::default() };
        let (_, multi) = run_algorithm1(&h, &mu, &c, &config, None).unwrap();
        assert_eq!(multi.runs, 5);
        assert!(multi.best_wsr() >= single.best_wsr());
    }
}

#[test]
fn random_init_is_reproducible() {
    let dims = NetworkDims::new(3, 3, 3, 2).unwrap();
    let h = generate_channels(dims, 5.0, 3).unwrap();
    let config = OptimizerConfig { init: InitStrategy::RandomGaussian(42), ..Default::default() };
    let mu = RateWeights::equal(3);
    let c = PowerConstraint::SumPower(3.0);
    let a = run_algorithm1(&h, &mu, &c, &config, None).unwrap();
    let b = run_algorithm1(&h, &mu, &c, &config, None).unwrap();
    assert_eq!(a.1, b.1);
    assert_eq!(a.0, b.0);
}

#[test]
fn robust_design_ignores_the_true_channels() {
    let dims = NetworkDims::new(2, 2, 2, 1).unwrap();
    let truth = generate_channels(dims, 4.0, 8).unwrap();
    let other = generate_channels(dims, 4.0, 9).unwrap();
    let ctx = RobustContext::new(generate_channels(dims, 4.0, 10).unwrap(), 0.4).unwrap();
    let mu = RateWeights::equal(2);
    let c = PowerConstraint::PerNode(vec![1.0; 2]);
    let a = run_algorithm1(&truth, &mu, &c, &OptimizerConfig::default(), Some(&ctx)).unwrap();
    let b = run_algorithm1(&other, &mu, &c, &OptimizerConfig::default(), Some(&ctx)).unwrap();
    assert_eq!(a.0, b.0);
}

#[test]
fn gradient_baseline_ascends_and_stays_feasible() {
    let dims = NetworkDims::new(3, 3, 3, 1).unwrap();
    let mu = RateWeights::equal(3);
    for seed in 0..6 {
        let h = generate_channels(dims, 10.0, 50 + seed).unwrap();
        for c in [PowerConstraint::SumPower(3.0), PowerConstraint::PerNode(vec![1.0; 3])] {
            let (v, trace) = projected_gradient_wsr(&h, &mu, &c, &GradientConfig::default()).unwrap();
            for w in trace.wsr.windows(2) {
                assert!(w[1] > w[0]);
            }
            assert!((wsr(&h, &v, mu.as_slice()) - trace.wsr.last().unwrap()).abs() < 1e-9);
            if c.is_sum() {
                assert!((power(&v) - 3.0).abs() < 1e-9);
            } else {
                for x in &v {
                    assert!((x.norm_squared() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
