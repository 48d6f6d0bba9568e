//! Self-checks of the numerical invariants, runnable from the command line.
//!
//! Each check draws its own random instances from a seed and reports a
//! [`CheckOutcome`]; an error inside a check counts as a failure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{wsr_gradient, wsr_gradient_fd};
use crate::channel::{generate_channels, ChannelSet, NetworkDims};
use crate::complexity::{feedback_amounts, flops, ComplexityParams, Method};
use crate::error::Result;
use crate::filters::{self, PowerConstraint, RateWeights};
use crate::linalg::{self, CMat, C64};
use crate::optimizer::{run_algorithm1, weighted_sum_rate, OptimizerConfig, MONOTONE_TOL};
use crate::rng::{self, complex_gaussian_matrix, Purpose};
use crate::robust::{self, RobustContext};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self { name, passed, detail },
            Err(e) => Self { name, passed: false, detail: format!("error: {e}") },
        }
    }
}

fn instance_rng(seed: u64, check: u64, index: usize) -> ChaCha8Rng {
    rng::stream(rng::mix_seed(seed, check), Purpose::Validation, index as u64)
}

fn random_dims(r: &mut ChaCha8Rng, max: usize) -> NetworkDims {
    let k = r.random_range(1..=max);
    let m = r.random_range(1..=max);
    let n = r.random_range(1..=max);
    let d = r.random_range(1..=m.min(n));
    NetworkDims { k, m, n, d }
}

fn random_precoders(r: &mut ChaCha8Rng, dims: NetworkDims) -> Vec<CMat> {
    (0..dims.k).map(|_| complex_gaussian_matrix(r, dims.m, dims.d, 1.0)).collect()
}

fn random_channels(r: &mut ChaCha8Rng, dims: NetworkDims) -> Result<ChannelSet> {
    generate_channels(dims, 1.0, r.random())
}

/// `R_k = log2 det E_k⁻¹` for every user.
pub fn check_rate_error_duality(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 1, idx);
            let dims = random_dims(&mut r, 4);
            let h = random_channels(&mut r, dims)?;
            let v = random_precoders(&mut r, dims);
            for k in 0..dims.k {
                let rate = filters::achievable_rate(&h, &v, k)?;
                let dual = filters::rate_from_error(&filters::error_covariance(&h, &v, k)?)?;
                worst = worst.max((rate - dual).abs());
            }
        }
        Ok((worst < 1e-9, format!("max |R - log2det E^-1| = {worst:.2e}")))
    };
    CheckOutcome::from_result("rate/error duality", run())
}

/// The MMSE receiver is not improved by any of 20 random perturbations.
pub fn check_mmse_optimality(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut worst_gain = f64::NEG_INFINITY;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 2, idx);
            let dims = random_dims(&mut r, 4);
            let h = random_channels(&mut r, dims)?;
            let v = random_precoders(&mut r, dims);
            for k in 0..dims.k {
                let u = filters::mmse_receiver(&h, &v, k)?;
                let base = linalg::trace_re(&filters::mse_matrix(&h, &v, &u, k)?);
                for _ in 0..20 {
                    let dir = complex_gaussian_matrix(&mut r, dims.d, dims.n, 1.0);
                    let step = dir.scale(1e-2 / linalg::power(&dir).sqrt());
                    let mse = linalg::trace_re(&filters::mse_matrix(&h, &v, &(&u + step), k)?);
                    worst_gain = worst_gain.max(base - mse);
                }
            }
        }
        Ok((worst_gain <= 1e-12, format!("largest MSE decrease from a perturbation = {worst_gain:.2e}")))
    };
    CheckOutcome::from_result("MMSE receiver optimality", run())
}

/// Power is non-increasing in λ and the bisection lands on the budget or
/// clamps at λ = 0.
pub fn check_power_monotonicity(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let grid: Vec<f64> = (0..50).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 49.0)).collect();
        let mut non_monotone = 0;
        let mut worst_rel: f64 = 0.0;
        let mut clamps = 0;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 3, idx);
            let m = r.random_range(1..=5);
            let rank = r.random_range(1..=m);
            let d = r.random_range(1..=m);
            let a = complex_gaussian_matrix(&mut r, m, rank, 1.0);
            let psi = &a * a.adjoint();
            // Keep B in the range of Ψ so the λ = 0 limit stays finite.
            let rhs = &psi * complex_gaussian_matrix(&mut r, m, d, 1.0);
            let powers = grid
                .iter()
                .map(|&l| filters::per_node_power(&psi, &rhs, l))
                .collect::<Result<Vec<_>>>()?;
            if powers.windows(2).any(|w| !(w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))) {
                non_monotone += 1;
            }
            let budget = 10f64.powf(r.random_range(-1.0..2.0));
            let sol = filters::solve_per_node_multiplier(&psi, &rhs, budget, 1e-8)?;
            if sol.clamped {
                clamps += 1;
            } else {
                worst_rel = worst_rel.max((sol.power - budget).abs() / budget);
            }
        }
        Ok((
            non_monotone == 0 && worst_rel <= 1e-6,
            format!("{non_monotone} non-monotone profiles, max relative power error {worst_rel:.2e}, {clamps} clamped"),
        ))
    };
    CheckOutcome::from_result("power monotone in multiplier", run())
}

fn desk_runs(instances: usize, seed: u64, check: u64, snr_db: f64) -> Result<Vec<(bool, crate::optimizer::OptimizerTrace)>> {
    let dims = NetworkDims { k: 3, m: 3, n: 3, d: 1 };
    let mu = RateWeights::equal(3);
    let config = OptimizerConfig::default();
    let mut out = Vec::with_capacity(2 * instances);
    for idx in 0..instances {
        let h = generate_channels(dims, crate::channel::snr_to_sigma_h(snr_db), rng::mix_seed(seed ^ check, idx as u64))?;
        for constraint in [PowerConstraint::SumPower(3.0), PowerConstraint::PerNode(vec![1.0; 3])] {
            let (_, trace) = run_algorithm1(&h, &mu, &constraint, &config, None)?;
            out.push((constraint.is_sum(), trace));
        }
    }
    Ok(out)
}

/// Every iterate meets its power constraint.
pub fn check_power_feasibility(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let tol = OptimizerConfig::default().bisection_tol;
        let (mut sum_worst, mut node_worst): (f64, f64) = (0.0, 0.0);
        for (is_sum, trace) in desk_runs(instances, seed, 4, 10.0)? {
            let worst = trace.power_error.iter().copied().fold(0.0, f64::max);
            if is_sum {
                sum_worst = sum_worst.max(worst);
            } else {
                node_worst = node_worst.max(worst);
            }
        }
        Ok((
            sum_worst <= 1e-9 && node_worst <= tol * (1.0 + 1e-6),
            format!("sum-power max relative error {sum_worst:.2e}, per-node {node_worst:.2e}"),
        ))
    };
    CheckOutcome::from_result("power feasibility", run())
}

/// The weighted sum rate never drops between iterations and every run
/// terminates within the iteration cap. Convergence statistics are reported
/// but not judged.
pub fn check_monotone_convergence(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let max_iters = OptimizerConfig::default().max_iters;
        let runs = desk_runs(instances, seed, 5, 10.0)?;
        let mut violations = 0;
        let mut converged = 0;
        let mut overrun = 0;
        let mut iters: Vec<usize> = Vec::with_capacity(runs.len());
        for (_, trace) in &runs {
            violations += trace
                .wsr
                .windows(2)
                .filter(|w| w[1] < w[0] - MONOTONE_TOL * w[0].abs().max(1.0))
                .count();
            converged += usize::from(trace.converged);
            overrun += usize::from(trace.iterations > max_iters || trace.wsr.len() > max_iters + 1);
            iters.push(trace.iterations);
        }
        iters.sort_unstable();
        let median = iters[iters.len() / 2];
        let rate = converged as f64 / runs.len() as f64;
        Ok((
            violations == 0 && overrun == 0,
            format!(
                "{violations} decreasing steps, {overrun} runs past the cap; {:.1}% converged, median {median} iterations",
                100.0 * rate
            ),
        ))
    };
    CheckOutcome::from_result("monotone ascent", run())
}

fn real_coordinate_gradient(v: &mut [CMat], step: f64, mut f: impl FnMut(&[CMat]) -> Result<f64>) -> Result<Vec<f64>> {
    let mut g = Vec::new();
    for j in 0..v.len() {
        for idx in 0..v[j].len() {
            let orig = v[j][idx];
            for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                v[j][idx] = orig + dir * step;
                let plus = f(v)?;
                v[j][idx] = orig - dir * step;
                let minus = f(v)?;
                g.push((plus - minus) / (2.0 * step));
            }
            v[j][idx] = orig;
        }
    }
    Ok(g)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// With receivers and weights frozen at their WMMSE values, the weighted MSE
/// and the negated weighted sum rate have the same gradient in `V`.
pub fn check_weight_gradient_alignment(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let dims = NetworkDims { k: 2, m: 2, n: 2, d: 1 };
        let mut worst: f64 = 0.0;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 6, idx);
            let h = random_channels(&mut r, dims)?;
            let mu = RateWeights::new(vec![r.random_range(0.25..2.0), r.random_range(0.25..2.0)])?;
            let mut v = random_precoders(&mut r, dims);
            let u = (0..2).map(|k| filters::mmse_receiver(&h, &v, k)).collect::<Result<Vec<_>>>()?;
            let e = (0..2).map(|k| filters::error_covariance(&h, &v, k)).collect::<Result<Vec<_>>>()?;
            let w = filters::mse_weights(&e, &mu)?;
            let wmse = real_coordinate_gradient(&mut v, 1e-5, |v| {
                let mut total = 0.0;
                for k in 0..2 {
                    total += linalg::trace_re(&(&w[k] * filters::mse_matrix(&h, v, &u[k], k)?));
                }
                Ok(total)
            })?;
            let neg_wsr = real_coordinate_gradient(&mut v, 1e-5, |v| Ok(-weighted_sum_rate(&h, v, &mu)?))?;
            worst = worst.max(rel_diff(&wmse, &neg_wsr));
        }
        Ok((worst < 1e-4, format!("max relative gradient mismatch {worst:.2e}")))
    };
    CheckOutcome::from_result("WMSE/WSR gradient alignment", run())
}

/// Analytic WSR gradient against central differences.
pub fn check_wsr_gradient(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let dims = NetworkDims { k: 2, m: 2, n: 2, d: 1 };
        let mu = RateWeights::equal(2);
        let mut worst: f64 = 0.0;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 7, idx);
            let h = random_channels(&mut r, dims)?;
            let v = random_precoders(&mut r, dims);
            let flat = |g: Vec<CMat>| g.iter().flat_map(|m| m.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>();
            let a = flat(wsr_gradient(&h, &v, &mu)?);
            let n = flat(wsr_gradient_fd(&h, &v, &mu, 1e-6)?);
            worst = worst.max(rel_diff(&a, &n));
        }
        Ok((worst < 1e-5, format!("max relative error {worst:.2e}")))
    };
    CheckOutcome::from_result("WSR gradient", run())
}

/// Every robust operation with zero mismatch variance equals the nominal one.
pub fn check_robust_reduction(instances: usize, seed: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for idx in 0..instances {
            let mut r = instance_rng(seed, 8, idx);
            let dims = random_dims(&mut r, 4);
            let h = random_channels(&mut r, dims)?;
            let v = random_precoders(&mut r, dims);
            let mu = RateWeights::equal(dims.k);
            let ctx = RobustContext::new(h.clone(), 0.0)?;
            let mut u = Vec::new();
            for k in 0..dims.k {
                let uk = filters::mmse_receiver(&h, &v, k)?;
                let pairs = [
                    (robust::robust_interference_cov(&ctx, &v, k)?, filters::interference_cov(&h, &v, k)?),
                    (robust::robust_receiver(&ctx, &v, k)?, uk.clone()),
                    (robust::robust_error_covariance(&ctx, &v, k)?, filters::error_covariance(&h, &v, k)?),
                ];
                for (a, b) in &pairs {
                    worst = worst.max(linalg::max_abs_diff(a, b));
                }
                let rr = robust::robust_rate(&ctx, &v, k)? - filters::achievable_rate(&h, &v, k)?;
                worst = worst.max(rr.abs());
                u.push(uk);
            }
            let e = (0..dims.k).map(|k| filters::error_covariance(&h, &v, k)).collect::<Result<Vec<_>>>()?;
            let w = filters::mse_weights(&e, &mu)?;
            for (a, b) in robust::robust_weights(&ctx, &v, &mu)?.iter().zip(&w) {
                worst = worst.max(linalg::max_abs_diff(a, b));
            }
            let rs = robust::robust_sum_power_precoders(&ctx, &u, &w, dims.k as f64)?;
            let ns = filters::sum_power_precoders(&h, &u, &w, dims.k as f64)?;
            for (a, b) in rs.precoders.iter().zip(&ns.precoders) {
                worst = worst.max(linalg::max_abs_diff(a, b));
            }
            for k in 0..dims.k {
                let a = robust::robust_per_node_precoder(&ctx, &u, &w, k, 1.0, 1e-8)?;
                let b = filters::per_node_precoder(&h, &u, &w, k, 1.0, 1e-8)?;
                worst = worst.max(linalg::max_abs_diff(&a.precoder, &b.precoder));
            }
        }
        Ok((worst <= 1e-12, format!("max element-wise difference {worst:.2e}")))
    };
    CheckOutcome::from_result("robust-to-nominal reduction", run())
}

/// Reference feedback totals and the flop ordering of the three methods.
pub fn check_complexity_model() -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let fb = feedback_amounts(&ComplexityParams::with_default_iterations(4, 5, 5, 2))?;
        let totals = [fb.gradient.total(), fb.proposed_ind.total(), fb.proposed_sum.total()];
        let mut ordered = true;
        for k in 2..=8 {
            let p = ComplexityParams::with_default_iterations(k, 5, 5, 2);
            let g = flops(&p, Method::Gradient)?.total;
            let i = flops(&p, Method::ProposedInd)?.total;
            let s = flops(&p, Method::ProposedSum)?.total;
            ordered &= s < i && i < g;
        }
        Ok((
            totals == [700.0, 660.0, 670.0] && ordered,
            format!("feedback {totals:?} at K = 4, flop ordering sum < ind < gradient for K = 2..8: {ordered}"),
        ))
    };
    CheckOutcome::from_result("complexity model", run())
}

/// The full suite at its default sizes.
pub fn run_suite(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_rate_error_duality(1000, seed),
        check_mmse_optimality(50, seed),
        check_power_monotonicity(100, seed),
        check_power_feasibility(50, seed),
        check_monotone_convergence(100, seed),
        check_weight_gradient_alignment(50, seed),
        check_wsr_gradient(50, seed),
        check_robust_reduction(100, seed),
        check_complexity_model(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = [
            check_rate_error_duality(50, 3),
            check_mmse_optimality(5, 3),
            check_power_monotonicity(20, 3),
            check_power_feasibility(5, 3),
            check_weight_gradient_alignment(5, 3),
            check_wsr_gradient(5, 3),
            check_robust_reduction(10, 3),
            check_complexity_model(),
        ];
        for c in checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
