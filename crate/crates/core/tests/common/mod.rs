#![allow(dead_code)]

use auglag_core::{BoxSet, Matrix, ProblemInstance};
use proptest::collection::vec;
use proptest::prelude::*;

/// Instance together with the interior point used to build `b`.
#[derive(Debug, Clone)]
pub struct Sample {
    pub problem: ProblemInstance,
    pub z0: Vec<f64>,
}

/// `H = GᵀG` with `rank G ≥ n − m` (singular whenever `rank G < n`), `m ≤ ⌈n/2⌉` coupling rows, box `[−w, w]`, `b = Az0`.
pub fn sample(max_n: usize) -> impl Strategy<Value = Sample> {
    (2usize..=max_n)
        .prop_flat_map(|n| (Just(n), 1usize..=n.div_ceil(2))).prop_flat_map(|(n, m)| (Just(n), Just(m), (n - m).max(1)..=n))
        .prop_flat_map(|(n, m, r)| {
            (
                Just((n, m)),
                vec(-2.0f64..2.0, r * n),
                vec(-2.0f64..2.0, n),
                vec(-2.0f64..2.0, m * n),
                vec(-0.9f64..0.9, n),
                vec(0.2f64..2.0, n),
            )
        })
        .prop_filter_map("coupling must have full row rank", |((n, m), g, q, a, t, w)| {
            let r = g.len() / n;
            let h = Matrix::from_row_major(r, n, g).ok()?.gram();
            let a = Matrix::from_row_major(m, n, a).ok()?;
            let z0: Vec<f64> = t.iter().zip(&w).map(|(ti, wi)| ti * wi).collect();
            let b = a.mul_vec(&z0);
            let bounds = BoxSet::new(w.iter().map(|v| -v).collect(), w).ok()?;
            let problem = ProblemInstance::new(h, q, a, b, bounds).ok()?;
            let smallest = problem.coupling().outer_gram().symmetric_eigenvalues().ok()?[0];
            (smallest > 1e-3).then_some(Sample { problem, z0 })
        })
}

/// Point of the box from unit-interval coordinates, with some coordinates pinned to a bound.
pub fn box_point(bounds: &BoxSet, t: &[f64], pin: &[u8]) -> Vec<f64> {
    (0..bounds.dim())
        .map(|i| {
            let (l, u) = (bounds.lower()[i], bounds.upper()[i]);
            match pin[i % pin.len()] % 4 {
                0 => l,
                1 => u,
                _ => l + t[i % t.len()] * (u - l),
            }
        })
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
