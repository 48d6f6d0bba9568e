//! Closed-form complex-multiplication counts and feedback amounts for the
//! gradient-descent baseline and the two weighted-MMSE designs.
//!
//! Stage `a.*` rows belong to the gradient method, `b.*` rows to the proposed
//! designs (`b.6-1` sum power, `b.6-2` per-node power with `I₃` bisection
//! steps). Counts are real-valued estimates and are never rounded.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    /// Outer iterations.
    pub i1: usize,
    /// Step-size trials of the gradient method.
    pub i2: usize,
    /// Bisection steps of the per-node design.
    pub i3: usize,
}

impl ComplexityParams {
    /// `I₁ = I₂ = I₃ = 10`.
    pub fn with_default_iterations(k: usize, m: usize, n: usize, d: usize) -> Self {
        Self { k, m, n, d, i1: 10, i2: 10, i3: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.k, self.m, self.n, self.d, self.i1, self.i2, self.i3];
        if all.contains(&0) {
            return Err(Error::InvalidParameter(format!("complexity parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// `N × N` inversion: `2N³/3`.
pub fn inversion_cost(n: f64) -> f64 {
    2.0 / 3.0 * n.powi(3)
}

/// SVD of an `N × M` matrix: `7NM² + 4M³`.
pub fn svd_cost(n: f64, m: f64) -> f64 {
    7.0 * n * m * m + 4.0 * m.powi(3)
}

/// `N × N` Cholesky factorization: `N³/3`.
pub fn cholesky_cost(n: f64) -> f64 {
    n.powi(3) / 3.0
}

/// `(c¹_N, c²_NM, c³_N)`.
pub fn primitive_costs(n: usize, m: usize) -> (f64, f64, f64) {
    let (n, m) = (n as f64, m as f64);
    (inversion_cost(n), svd_cost(n, m), cholesky_cost(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gradient,
    ProposedSum,
    ProposedInd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gradient, Method::ProposedInd, Method::ProposedSum];

    pub fn label(self) -> &'static str {
        match self {
            Method::Gradient => "gradient",
            Method::ProposedSum => "proposed_sum",
            Method::ProposedInd => "proposed_ind",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub method: Method,
    pub stages: Vec<(&'static str, f64)>,
    pub total: f64,
}

impl ComplexityReport {
    fn new(method: Method, stages: Vec<(&'static str, f64)>) -> Self {
        let total = stages.iter().map(|(_, c)| c).sum();
        Self { method, stages, total }
    }

    pub fn stage(&self, name: &str) -> Option<f64> {
        self.stages.iter().find(|(s, _)| *s == name).map(|(_, c)| *c)
    }
}

struct Vars {
    k: f64,
    m: f64,
    n: f64,
    d: f64,
    i1: f64,
    i2: f64,
    i3: f64,
}

impl From<&ComplexityParams> for Vars {
    fn from(p: &ComplexityParams) -> Self {
        Self {
            k: p.k as f64,
            m: p.m as f64,
            n: p.n as f64,
            d: p.d as f64,
            i1: p.i1 as f64,
            i2: p.i2 as f64,
            i3: p.i3 as f64,
        }
    }
}

/// Cost of evaluating every user's rate once (rows a.1, a.4, b.1, b.7).
fn rate_evaluation(v: &Vars) -> f64 {
    let Vars { k, m, n, d, .. } = *v;
    k * (m * m * d + 1.0)
        + k * (k - 1.0) * (1.0 + 2.0 * m * n * d + n * n * d)
        + k * (2.0 + 2.0 * m * n * d + n * n * d + n.powi(3) + inversion_cost(n))
}

fn a2(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, .. } = *v;
    i1 * (k * (2.0 * k - 1.0) * (1.0 + 2.0 * m * n * d + n * n * d)
        + k * (2.0 * k - 1.0)
            * (9.0 + 2.0 * inversion_cost(n) + 2.0 * m * n * n + 2.0 * m * m * n + 2.0 * m * m * d + m * d * d))
}

fn a3(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, i2, .. } = *v;
    let inner = 2.0 * k * (k - 1.0) * (1.0 + 2.0 * m * n * d + n * n * d)
        + 2.0 * k * (2.0 + 2.0 * m * n * d + n * n * d + n.powi(3) + inversion_cost(n))
        + k * (m * m * d + 1.0)
        + 2.0
        + m * d * d;
    i1 * (k * i2 * (i2 + 1.0) / 2.0 + k * i2 * inner)
}

fn a5(v: &Vars) -> f64 {
    let Vars { k, m, n, d, .. } = *v;
    k * (1.0 + 2.0 * m * d + 2.0 * m * m * d + svd_cost(m, d))
        + k * (k - 1.0) * (2.0 * m * n * d + n * n * d)
        + k * (2.0 * m * n * d
            + 2.0 * n * n * d
            + 4.0 * n * d * d
            + m * d * d
            + d.powi(3)
            + inversion_cost(n)
            + cholesky_cost(d)
            + svd_cost(d, d)
            + svd_cost(d, d))
}

fn b2(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, .. } = *v;
    i1 * k * (k - 1.0) * (1.0 + 2.0 * m * n * d + n * n * d)
}

fn b3(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, .. } = *v;
    i1 * k * (3.0 * m * n * d + 2.0 * n * n * d + inversion_cost(n))
}

fn b4(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, .. } = *v;
    i1 * k * (2.0 * m * n * d + n * n * d + n * d * d + inversion_cost(n) + inversion_cost(d))
}

fn b5(v: &Vars) -> f64 {
    v.i1 * v.k * inversion_cost(v.d)
}

fn b6_sum(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, .. } = *v;
    i1 * (k * (k - 1.0) * (2.0 * n * m * d + m * d * d + m * m * d)
        + k * (n * d * d + d.powi(3))
        + k * (3.0 * m * n * d + 2.0 * m * d * d + m * m * d + 1.0 + inversion_cost(m))
        + k * (m * m * d + m * d))
}

fn b6_ind(v: &Vars) -> f64 {
    let Vars { k, m, n, d, i1, i3, .. } = *v;
    i1 * (k * (k - 1.0) * (2.0 * n * m * d + m * d * d + m * m * d)
        + i3 * k * m * m * d
        + (i3 + 1.0) * k * (3.0 * m * n * d + 2.0 * m * d * d + m * m * d + 1.0 + inversion_cost(m)))
}

pub fn flops_gradient(params: &ComplexityParams) -> Result<ComplexityReport> {
    params.validate()?;
    let v = Vars::from(params);
    Ok(ComplexityReport::new(
        Method::Gradient,
        vec![
            ("a.1", rate_evaluation(&v)),
            ("a.2", a2(&v)),
            ("a.3", a3(&v)),
            ("a.4", v.i1 * rate_evaluation(&v)),
            ("a.5", a5(&v)),
        ],
    ))
}

fn proposed(params: &ComplexityParams, method: Method) -> Result<ComplexityReport> {
    params.validate()?;
    let v = Vars::from(params);
    let b6 = match method {
        Method::ProposedSum => ("b.6-1", b6_sum(&v)),
        _ => ("b.6-2", b6_ind(&v)),
    };
    Ok(ComplexityReport::new(
        method,
        vec![
            ("b.1", rate_evaluation(&v)),
            ("b.2", b2(&v)),
            ("b.3", b3(&v)),
            ("b.4", b4(&v)),
            ("b.5", b5(&v)),
            b6,
            ("b.7", v.i1 * rate_evaluation(&v)),
        ],
    ))
}

pub fn flops_proposed_sum(params: &ComplexityParams) -> Result<ComplexityReport> {
    proposed(params, Method::ProposedSum)
}

pub fn flops_proposed_ind(params: &ComplexityParams) -> Result<ComplexityReport> {
    proposed(params, Method::ProposedInd)
}

pub fn flops(params: &ComplexityParams, method: Method) -> Result<ComplexityReport> {
    match method {
        Method::Gradient => flops_gradient(params),
        other => proposed(params, other),
    }
}

/// Scalars fed back to one transmitter: channel knowledge plus the
/// coefficients exchanged over `I₁` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback {
    pub csi: f64,
    pub coefficients: f64,
}

impl Feedback {
    pub fn total(&self) -> f64 {
        self.csi + self.coefficients
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackAmounts {
    pub gradient: Feedback,
    pub proposed_ind: Feedback,
    pub proposed_sum: Feedback,
}

impl FeedbackAmounts {
    pub fn for_method(&self, method: Method) -> Feedback {
        match method {
            Method::Gradient => self.gradient,
            Method::ProposedInd => self.proposed_ind,
            Method::ProposedSum => self.proposed_sum,
        }
    }
}

/// Gradient: global CSI `MNK²` plus `Md(K−1)` per iteration; proposed:
/// local CSI `MNK` plus `(Md + d²)K` per iteration (one more scalar per
/// iteration in sum-power mode).
pub fn feedback_amounts(params: &ComplexityParams) -> Result<FeedbackAmounts> {
    params.validate()?;
    let Vars { k, m, n, d, i1, .. } = Vars::from(params);
    let local = m * n * k;
    let per_iter = (m * d + d * d) * k;
    Ok(FeedbackAmounts {
        gradient: Feedback { csi: m * n * k * k, coefficients: m * d * (k - 1.0) * i1 },
        proposed_ind: Feedback { csi: local, coefficients: per_iter * i1 },
        proposed_sum: Feedback { csi: local, coefficients: (per_iter + 1.0) * i1 },
    })
}

/// One row of the complexity / feedback curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub k: usize,
    pub method: Method,
    pub total_flops: f64,
    pub total_feedback: f64,
}

/// Sweeps `K` over `ks` with the remaining parameters taken from `base`.
pub fn complexity_curves(base: &ComplexityParams, ks: impl IntoIterator<Item = usize>) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    for k in ks {
        let p = ComplexityParams { k, ..*base };
        let fb = feedback_amounts(&p)?;
        for method in Method::ALL {
            rows.push(CurveRow {
                k,
                method,
                total_flops: flops(&p, method)?.total,
                total_feedback: fb.for_method(method).total(),
            });
        }
    }
    Ok(rows)
}
