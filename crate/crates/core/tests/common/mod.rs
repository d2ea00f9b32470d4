//! Shared helpers for integration tests.
#![allow(dead_code)]

use abid::neighbors::DirectionBundle;
use abid::synth::random_orthogonal;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `k` Gaussian directions in `R^dim`.
pub fn random_bundle(rng: &mut ChaCha8Rng, k: usize, dim: usize) -> DirectionBundle {
    let vs: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    DirectionBundle::from_vectors(&vs).unwrap()
}

/// `k` points spanning an exact `d`-dimensional linear subspace of `R^ambient`:
/// Gaussian coefficients on `d` orthonormal vectors.
pub fn subspace_bundle(rng: &mut ChaCha8Rng, k: usize, d: usize, ambient: usize) -> DirectionBundle {
    let basis = random_orthogonal(ambient, rng);
    let vs: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let coef: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            (0..ambient)
                .map(|j| coef.iter().zip(&basis).map(|(c, b)| c * b[j]).sum())
                .collect()
        })
        .collect();
    DirectionBundle::from_vectors(&vs).unwrap()
}

/// Explicit `k×k` cosine matrix, diagonal included.
pub fn cosine_matrix(bundle: &DirectionBundle) -> Vec<Vec<f64>> {
    bundle
        .iter()
        .map(|a| {
            bundle
                .iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect()
}

/// Off-diagonal sum of squares and sum from the explicit cosine matrix.
pub fn naive_off_diagonal(bundle: &DirectionBundle) -> (f64, f64) {
    let c = cosine_matrix(bundle);
    let mut sq = 0.0;
    let mut lin = 0.0;
    for (i, row) in c.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                sq += v * v;
                lin += v;
            }
        }
    }
    (sq, lin)
}

/// Cosines of the bundle augmented with the reflection of every direction,
/// over pairs drawn from different source directions.
pub fn reflected_cosines(bundle: &DirectionBundle) -> Vec<f64> {
    let k = bundle.k();
    let mut aug: Vec<(usize, Vec<f64>)> = bundle.iter().enumerate().map(|(i, v)| (i, v.to_vec())).collect();
    aug.extend(bundle.iter().enumerate().map(|(i, v)| (i, v.iter().map(|x| -x).collect())));
    let mut out = Vec::with_capacity(4 * k * (k - 1));
    for (si, a) in &aug {
        for (sj, b) in &aug {
            if si != sj {
                out.push(a.iter().zip(b).map(|(x, y)| x * y).sum());
            }
        }
    }
    out
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn population_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}
