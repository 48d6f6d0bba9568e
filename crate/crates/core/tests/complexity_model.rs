//! A second transcription of the operation-count table, expanded as
//! polynomials in K, checked against the library on random parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmmse_ic::complexity::{complexity_curves, feedback_amounts, flops, ComplexityParams, Method};

struct P {
    k: f64,
    m: f64,
    n: f64,
    d: f64,
    i1: f64,
    i2: f64,
    i3: f64,
}

impl P {
    fn link(&self) -> f64 {
        1.0 + 2.0 * self.m * self.n * self.d + self.n * self.n * self.d
    }

    fn rate(&self) -> f64 {
        let P { k, m, n, d, .. } = *self;
        k * k * self.link() + k * (m * m * d + 2.0 + 5.0 * n.powi(3) / 3.0)
    }

    fn stages(&self) -> Vec<(&'static str, f64)> {
        let P { k, m, n, d, i1, i2, i3 } = *self;
        let a = self.link();
        let b = 2.0 + 2.0 * m * n * d + n * n * d + 5.0 * n.powi(3) / 3.0;
        let cross = 2.0 * n * m * d + m * d * d + m * m * d;
        let solve = 3.0 * m * n * d + 2.0 * m * d * d + m * m * d + 1.0 + 2.0 * m.powi(3) / 3.0;
        vec![
            ("a.1", self.rate()),
            (
                "a.2",
                i1 * (2.0 * k * k - k)
                    * (a + 9.0 + 4.0 * n.powi(3) / 3.0 + 2.0 * m * n * n + 2.0 * m * m * n + 2.0 * m * m * d + m * d * d),
            ),
            (
                "a.3",
                i1 * k * i2
                    * ((i2 + 1.0) / 2.0 + 2.0 * k * k * a - 2.0 * k * a + 2.0 * k * b + k * (m * m * d + 1.0) + 2.0 + m * d * d),
            ),
            ("a.4", i1 * self.rate()),
            (
                "a.5",
                k * (1.0 + 2.0 * m * d + 2.0 * m * m * d + 7.0 * m * d * d + 4.0 * d.powi(3))
                    + (k * k - k) * (2.0 * m * n * d + n * n * d)
                    + k * (2.0 * m * n * d + 2.0 * n * n * d + 4.0 * n * d * d + m * d * d + d.powi(3)
                        + 2.0 * n.powi(3) / 3.0
                        + d.powi(3) / 3.0
                        + 22.0 * d.powi(3)),
            ),
            ("b.1", self.rate()),
            ("b.2", i1 * (k * k - k) * a),
            ("b.3", i1 * k * (3.0 * m * n * d + 2.0 * n * n * d + 2.0 * n.powi(3) / 3.0)),
            ("b.4", i1 * k * (2.0 * m * n * d + n * n * d + n * d * d + 2.0 * n.powi(3) / 3.0 + 2.0 * d.powi(3) / 3.0)),
            ("b.5", i1 * k * 2.0 * d.powi(3) / 3.0),
            ("b.6-1", i1 * ((k * k - k) * cross + k * (n * d * d + d.powi(3)) + k * solve + k * (m * m * d + m * d))),
            ("b.6-2", i1 * ((k * k - k) * cross + i3 * k * m * m * d + (i3 + 1.0) * k * solve)),
            ("b.7", i1 * self.rate()),
        ]
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn independent_transcription_agrees() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let params = ComplexityParams {
            k: r.random_range(1..=12),
            m: r.random_range(1..=8),
            n: r.random_range(1..=8),
            d: r.random_range(1..=4),
            i1: r.random_range(1..=30),
            i2: r.random_range(1..=30),
            i3: r.random_range(1..=30),
        };
        let p = P {
            k: params.k as f64,
            m: params.m as f64,
            n: params.n as f64,
            d: params.d as f64,
            i1: params.i1 as f64,
            i2: params.i2 as f64,
            i3: params.i3 as f64,
        };
        let reference = p.stages();
        let get = |name: &str| reference.iter().find(|(s, _)| *s == name).unwrap().1;
        for method in Method::ALL {
            let report = flops(&params, method).unwrap();
            let mut sum = 0.0;
            for (name, value) in &report.stages {
                assert!(close(*value, get(name)), "{method:?} {name}: {value} vs {} for {params:?}", get(name));
                sum += value;
            }
            assert!(close(report.total, sum));
        }
    }
}

#[test]
fn reference_feedback_values() {
    let fb = feedback_amounts(&ComplexityParams::with_default_iterations(4, 5, 5, 2)).unwrap();
    assert_eq!(fb.gradient.total(), 700.0);
    assert_eq!(fb.proposed_ind.total(), 660.0);
    assert_eq!(fb.proposed_sum.total(), 670.0);
}

#[test]
fn single_user_needs_only_its_own_channel() {
    let fb = feedback_amounts(&ComplexityParams::with_default_iterations(1, 5, 4, 2)).unwrap();
    assert_eq!(fb.gradient.csi, 20.0);
    assert_eq!(fb.gradient.coefficients, 0.0);
}

#[test]
fn feedback_crossover_exists() {
    let base = ComplexityParams::with_default_iterations(1, 5, 5, 2);
    let rows = complexity_curves(&base, 1..=20).unwrap();
    let total = |k, m| rows.iter().find(|r| r.k == k && r.method == m).unwrap().total_feedback;
    let crossover = (1..=20)
        .find(|&k| {
            (k..=20).all(|j| {
                total(j, Method::ProposedInd) < total(j, Method::Gradient)
                    && total(j, Method::ProposedSum) < total(j, Method::Gradient)
            })
        })
        .expect("crossover within K <= 20");
    assert!(crossover > 1);
}

#[test]
fn curves_have_increasing_k() {
    let rows = complexity_curves(&ComplexityParams::with_default_iterations(2, 5, 5, 2), 2..=8).unwrap();
    assert_eq!(rows.len(), 21);
    for w in rows.windows(2) {
        assert!(w[1].k >= w[0].k);
    }
}
