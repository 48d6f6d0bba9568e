//! Small complex dense linear-algebra layer over `nalgebra`.
//!
//! Every inverse taken by the filter algebra is of a matrix that is Hermitian
//! positive definite in exact arithmetic (interference-plus-noise covariances,
//! regularized transmit Gram matrices, MMSE error matrices). These go through
//! a Cholesky factorization of the Hermitian part; if that fails a ridge of
//! [`RIDGE`] is added once and the event is logged.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Diagonal loading applied when a nominally PD factorization fails.
pub const RIDGE: f64 = 1e-12;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// `(A + Aᴴ) / 2`.
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Real part of the trace.
pub fn trace_re(a: &CMat) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// `Tr(A Aᴴ)`, i.e. the squared Frobenius norm.
pub fn power(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest element-wise modulus of `A - Aᴴ`.
pub fn hermitian_asymmetry(a: &CMat) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Adds `shift · I` to a square matrix.
pub fn add_diag(a: &CMat, shift: f64) -> CMat {
    let mut out = a.clone();
    for i in 0..out.nrows() {
        out[(i, i)] += C64::new(shift, 0.0);
    }
    out
}

/// Cholesky factorization of the Hermitian part of `a`, with a single ridge
/// retry.
pub fn hpd_factor(a: &CMat, what: &'static str) -> Result<Cholesky<C64, Dyn>> {
    let h = hermitian_part(a);
    if !h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    if let Some(c) = positive_cholesky(h.clone()) {
        return Ok(c);
    }
    log::warn!("{what}: Cholesky failed, retrying with ridge {RIDGE:e}");
    positive_cholesky(add_diag(&h, RIDGE)).ok_or(Error::NotPositiveDefinite(what))
}

/// nalgebra takes complex square roots of the pivots, so a negative pivot
/// does not make it fail; reject any factor whose diagonal is not real
/// positive.
fn positive_cholesky(h: CMat) -> Option<Cholesky<C64, Dyn>> {
    let c = Cholesky::new(h)?;
    let ok = c.l_dirty().diagonal().iter().all(|z| z.re > 0.0 && z.re.is_finite() && z.im == 0.0);
    ok.then_some(c)
}

pub fn hpd_inverse(a: &CMat, what: &'static str) -> Result<CMat> {
    Ok(hermitian_part(&hpd_factor(a, what)?.inverse()))
}

/// Solves `A X = B` for Hermitian PD `A`.
pub fn hpd_solve(a: &CMat, b: &CMat, what: &'static str) -> Result<CMat> {
    Ok(hpd_factor(a, what)?.solve(b))
}

/// Natural-log determinant of a Hermitian PD matrix.
pub fn hpd_ln_det(a: &CMat, what: &'static str) -> Result<f64> {
    let c = hpd_factor(a, what)?;
    Ok(2.0 * c.l_dirty().diagonal().iter().map(|z| z.re.ln()).sum::<f64>())
}

/// Eigen-decomposition of the Hermitian part of `a`: `(eigenvalues, Q)` with
/// `A = Q diag(σ) Qᴴ`.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigen(a).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Multiplies each column by a unit phase so that its largest-magnitude entry
/// is real and nonnegative. Ties resolve to the lowest row index.
pub fn fix_column_phases(a: &mut CMat) {
    for mut col in a.column_iter_mut() {
        let mut best = 0;
        for (r, z) in col.iter().enumerate() {
            if z.norm() > col[best].norm() {
                best = r;
            }
        }
        let pivot = col[best];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
    }
}

/// The `d` leading right-singular vectors of `h` as the columns of an
/// `ncols(h) × d` matrix, phase-normalized with [`fix_column_phases`].
pub fn leading_right_singular(h: &CMat, d: usize) -> CMat {
    let m = h.ncols();
    assert!(d <= m, "requested {d} right-singular vectors of an {m}-column matrix");
    // Eigenvectors of HᴴH are the right-singular vectors; this also covers
    // d > rank(H) (including H = 0) with an orthonormal completion.
    let gram = h.adjoint() * h;
    let (vals, vecs) = hermitian_eigen(&gram);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut out = zeros(m, d);
    for (c, &idx) in order.iter().take(d).enumerate() {
        out.set_column(c, &vecs.column(idx));
    }
    fix_column_phases(&mut out);
    out
}
