//! Reference computations written directly from the model, without the
//! library's filter code: dense LU inverses and determinants instead of
//! Cholesky, and the subtraction form of the error matrix.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wmmse_ic::{CMat, ChannelSet, NetworkDims, C64};

pub fn eye(n: usize) -> CMat {
    DMatrix::identity(n, n)
}

pub fn inv(a: &CMat) -> CMat {
    a.clone().try_inverse().expect("invertible")
}

pub fn log2_det(a: &CMat) -> f64 {
    a.clone().determinant().norm().log2()
}

pub fn cn<R: Rng>(rng: &mut R, rows: usize, cols: usize, var: f64) -> CMat {
    let s = (var / 2.0).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dims<R: Rng>(r: &mut R, max: usize) -> NetworkDims {
    let k = r.random_range(1..=max);
    let m = r.random_range(1..=max);
    let n = r.random_range(1..=max);
    let d = r.random_range(1..=m.min(n));
    NetworkDims::new(k, m, n, d).unwrap()
}

pub fn random_channels<R: Rng>(r: &mut R, dims: NetworkDims, var: f64) -> ChannelSet {
    ChannelSet::from_fn(dims, var, |_, _| cn(r, dims.n, dims.m, var)).unwrap()
}

pub fn random_precoders<R: Rng>(r: &mut R, dims: NetworkDims) -> Vec<CMat> {
    (0..dims.k).map(|_| cn(r, dims.m, dims.d, 1.0)).collect()
}

/// `I + Σ_{i≠k} H_ki V_i V_iᴴ H_kiᴴ`.
pub fn phi(h: &ChannelSet, v: &[CMat], k: usize) -> CMat {
    let mut out = eye(h.dims().n);
    for (i, vi) in v.iter().enumerate() {
        if i != k {
            let a = h.h(k, i) * vi;
            out += &a * a.adjoint();
        }
    }
    out
}

/// `log2 det(I + Φ⁻¹ G Gᴴ)` evaluated as a single determinant.
pub fn rate(h: &ChannelSet, v: &[CMat], k: usize) -> f64 {
    let g = h.h(k, k) * &v[k];
    let n = h.dims().n;
    log2_det(&(eye(n) + inv(&phi(h, v, k)) * &g * g.adjoint()))
}

pub fn wsr(h: &ChannelSet, v: &[CMat], mu: &[f64]) -> f64 {
    mu.iter().enumerate().map(|(k, m)| m * rate(h, v, k)).sum()
}

/// `(I + Vᴴ Hᴴ Φ⁻¹ H V)⁻¹`.
pub fn mmse_error(h: &ChannelSet, v: &[CMat], k: usize) -> CMat {
    let g = h.h(k, k) * &v[k];
    inv(&(eye(h.dims().d) + g.adjoint() * inv(&phi(h, v, k)) * &g))
}

/// `I − Vᴴ Hᴴ (Σ_i H V_i V_iᴴ Hᴴ + I)⁻¹ H V`. Cancels badly once `E` is
/// small, so only usable at moderate SNR.
pub fn mmse_error_subtractive(h: &ChannelSet, v: &[CMat], k: usize) -> CMat {
    let g = h.h(k, k) * &v[k];
    let total = phi(h, v, k) + &g * g.adjoint();
    eye(h.dims().d) - g.adjoint() * inv(&total) * &g
}

pub fn mmse_receiver(h: &ChannelSet, v: &[CMat], k: usize) -> CMat {
    let g = h.h(k, k) * &v[k];
    let total = phi(h, v, k) + &g * g.adjoint();
    g.adjoint() * inv(&total)
}

/// `E[(U y − s)(U y − s)ᴴ]` expanded term by term.
pub fn mse(h: &ChannelSet, v: &[CMat], u: &CMat, k: usize) -> CMat {
    let d = h.dims().d;
    let mut e = u * u.adjoint();
    for (i, vi) in v.iter().enumerate() {
        let mut a = u * h.h(k, i) * vi;
        if i == k {
            a -= eye(d);
        }
        e += &a * a.adjoint();
    }
    e
}

pub fn power(v: &[CMat]) -> f64 {
    v.iter().map(|m| m.norm_squared()).sum()
}

/// Central differences over the real and imaginary part of every entry.
pub fn fd_gradient(v: &[CMat], step: f64, f: impl Fn(&[CMat]) -> f64) -> Vec<f64> {
    let mut w = v.to_vec();
    let mut g = Vec::new();
    for j in 0..w.len() {
        for idx in 0..w[j].len() {
            let orig = w[j][idx];
            for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                w[j][idx] = orig + dir * step;
                let plus = f(&w);
                w[j][idx] = orig - dir * step;
                let minus = f(&w);
                g.push((plus - minus) / (2.0 * step));
            }
            w[j][idx] = orig;
        }
    }
    g
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Tr((Ψ + λI)⁻¹ B Bᴴ (Ψ + λI)⁻ᴴ)` by explicit inversion. Inaccurate when
/// `Ψ` is singular and `λ` is small.
pub fn precoder_power(psi: &CMat, rhs: &CMat, lambda: f64) -> f64 {
    let m = psi.nrows();
    let v = inv(&(psi + eye(m).scale(lambda))) * rhs;
    v.norm_squared()
}
