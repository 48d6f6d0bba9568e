//! Randomized invariants of the filter algebra and the optimizer.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use wmmse_ic::baselines::{project_onto_constraint, simple_mmse_run};
use wmmse_ic::filters::{self, RateWeights};
use wmmse_ic::robust::{self, RobustContext};
use wmmse_ic::{linalg, run_algorithm1, weighted_sum_rate, OptimizerConfig, PowerConstraint};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_holds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let var = r.random_range(0.1..10.0);
        let h = random_channels(&mut r, dims, var);
        let v = random_precoders(&mut r, dims);
        for k in 0..dims.k {
            let e = filters::error_covariance(&h, &v, k).unwrap();
            let lhs = filters::achievable_rate(&h, &v, k).unwrap();
            prop_assert!((lhs - filters::rate_from_error(&e).unwrap()).abs() < 1e-9);
            prop_assert!((lhs - rate(&h, &v, k)).abs() < 1e-9);
            prop_assert!(linalg::hermitian_asymmetry(&e) < 1e-10);
        }
    }

    #[test]
    fn mmse_receiver_beats_perturbations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let h = random_channels(&mut r, dims, 1.0);
        let v = random_precoders(&mut r, dims);
        let k = r.random_range(0..dims.k);
        let u = filters::mmse_receiver(&h, &v, k).unwrap();
        prop_assert!(max_abs_diff(&u, &mmse_receiver(&h, &v, k)) < 1e-9);
        let base = mse(&h, &v, &u, k).trace().re;
        for _ in 0..20 {
            let dir = cn(&mut r, dims.d, dims.n, 1.0);
            let perturbed = &u + dir.scale(1e-2 / dir.norm());
            prop_assert!(mse(&h, &v, &perturbed, k).trace().re >= base - 1e-12);
        }
    }

    #[test]
    fn weights_are_hermitian_pd(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let h = random_channels(&mut r, dims, 10.0);
        let v = random_precoders(&mut r, dims);
        let e: Vec<_> = (0..dims.k).map(|k| filters::error_covariance(&h, &v, k).unwrap()).collect();
        for w in filters::mse_weights(&e, &RateWeights::equal(dims.k)).unwrap() {
            prop_assert!(linalg::hermitian_asymmetry(&w) < 1e-10);
            prop_assert!(linalg::min_eigenvalue(&w) > 0.0);
        }
    }

    #[test]
    fn power_non_increasing_in_lambda(seed in any::<u64>(), lo in 0.0..5.0f64, gap in 1e-6..5.0f64) {
        let mut r = rng(seed);
        let m = r.random_range(1..=5);
        let a = cn(&mut r, m, m, 1.0);
        let psi = &a * a.adjoint();
        let d = r.random_range(1..=m);
        let rhs = cn(&mut r, m, d, 1.0);
        let p_lo = filters::per_node_power(&psi, &rhs, lo).unwrap();
        let p_hi = filters::per_node_power(&psi, &rhs, lo + gap).unwrap();
        prop_assert!(p_hi < p_lo);
    }

    #[test]
    fn robust_reduces_to_nominal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let h = random_channels(&mut r, dims, 1.0);
        let v = random_precoders(&mut r, dims);
        let ctx = RobustContext::new(h.clone(), 0.0).unwrap();
        for k in 0..dims.k {
            prop_assert!(max_abs_diff(
                &robust::robust_error_covariance(&ctx, &v, k).unwrap(),
                &filters::error_covariance(&h, &v, k).unwrap()
            ) <= 1e-12);
        }
    }

    #[test]
    fn robust_loading_lowers_believed_rate(seed in any::<u64>(), sigma in 1e-3..1.0f64) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let h = random_channels(&mut r, dims, 1.0);
        let v = random_precoders(&mut r, dims);
        let ctx = RobustContext::new(h.clone(), sigma).unwrap();
        for k in 0..dims.k {
            prop_assert!(robust::robust_rate(&ctx, &v, k).unwrap() <= filters::achievable_rate(&h, &v, k).unwrap() + 1e-12);
        }
    }

    #[test]
    fn wsr_is_linear_in_weights(seed in any::<u64>(), c in 0.01..100.0f64) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let h = random_channels(&mut r, dims, 1.0);
        let v = random_precoders(&mut r, dims);
        let mu = RateWeights::new((0..dims.k).map(|_| r.random_range(0.1..2.0)).collect()).unwrap();
        let a = weighted_sum_rate(&h, &v, &mu.scaled(c).unwrap()).unwrap();
        let b = c * weighted_sum_rate(&h, &v, &mu).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn projection_is_exact(seed in any::<u64>(), budget in 0.1..10.0f64) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let mut v = random_precoders(&mut r, dims);
        project_onto_constraint(&mut v, &PowerConstraint::SumPower(budget)).unwrap();
        prop_assert!((power(&v) - budget).abs() <= 1e-12 * budget);
        project_onto_constraint(&mut v, &PowerConstraint::PerNode(vec![budget; dims.k])).unwrap();
        for x in &v {
            prop_assert!((x.norm_squared() - budget).abs() <= 1e-12 * budget);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn algorithm_is_monotone_and_feasible(seed in any::<u64>(), snr in 0.0..20.0f64, sum in any::<bool>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let h = random_channels(&mut r, dims, 10f64.powf(snr / 10.0));
        let mu = RateWeights::new((0..dims.k).map(|_| r.random_range(0.25..2.0)).collect()).unwrap();
        let constraint = if sum {
            PowerConstraint::SumPower(dims.k as f64)
        } else {
            PowerConstraint::PerNode(vec![1.0; dims.k])
        };
        let config = OptimizerConfig::default();
        let (state, trace) = run_algorithm1(&h, &mu, &constraint, &config, None).unwrap();
        prop_assert!(trace.wsr.len() <= config.max_iters + 1);
        prop_assert_eq!(trace.monotonicity_violations, 0);
        for w in trace.wsr.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-6 * w[0].abs());
        }
        if sum {
            prop_assert!((power(&state.precoders) - dims.k as f64).abs() <= 1e-9 * dims.k as f64);
        } else {
            for v in &state.precoders {
                prop_assert!(v.norm_squared() <= 1.0 + 1e-8);
            }
        }
        prop_assert!((wsr(&h, &state.precoders, mu.as_slice()) - trace.best_wsr()).abs() < 1e-9);
    }

    #[test]
    fn simple_mmse_decreases_sum_mse(seed in any::<u64>(), sum in any::<bool>()) {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 3);
        let h = random_channels(&mut r, dims, 10.0);
        let constraint = if sum {
            PowerConstraint::SumPower(dims.k as f64)
        } else {
            PowerConstraint::PerNode(vec![1.0; dims.k])
        };
        let (_, trace) = simple_mmse_run(&h, &RateWeights::equal(dims.k), &constraint, &OptimizerConfig::default()).unwrap();
        for w in trace.sum_mse.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-8, "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn subtractive_error_form_agrees_at_moderate_snr() {
    for seed in 0..50 {
        let mut r = rng(seed);
        let dims = random_dims(&mut r, 4);
        let h = random_channels(&mut r, dims, 1.0);
        let v = random_precoders(&mut r, dims);
        for k in 0..dims.k {
            let e = filters::error_covariance(&h, &v, k).unwrap();
            assert!(max_abs_diff(&e, &mmse_error_subtractive(&h, &v, k)) < 1e-10);
            assert!(max_abs_diff(&e, &mmse_error(&h, &v, k)) < 1e-10);
        }
    }
}
