#![allow(dead_code)]

use centropy::TimeSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let d = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

/// `(x, y)` with unit variances and correlation `r`.
pub fn correlated_pair(seed: u64, n: usize, r: f64) -> (Vec<f64>, Vec<f64>) {
    let mut g = rng(seed);
    let x = normals(&mut g, n);
    let e = normals(&mut g, n);
    let s = (1.0 - r * r).sqrt();
    let y = x.iter().zip(&e).map(|(a, b)| r * a + s * b).collect();
    (x, y)
}

/// Lagged chain `X -> Z -> Y`: `X` is white noise,
/// `Z_t = c X_{t-1} + e`, `Y_t = c Z_{t-1} + e`. Columns ordered X, Z, Y.
pub fn lagged_chain(seed: u64, t: usize, c: f64) -> TimeSeries {
    let mut g = rng(seed);
    let x = normals(&mut g, t);
    let ez = normals(&mut g, t);
    let ey = normals(&mut g, t);
    let mut z = vec![0.0; t];
    let mut y = vec![0.0; t];
    for i in 1..t {
        z[i] = c * x[i - 1] + ez[i];
        y[i] = c * z[i - 1] + ey[i];
    }
    TimeSeries::from_columns(vec![x, z, y])
        .unwrap()
        .with_names(vec!["X".into(), "Z".into(), "Y".into()])
        .unwrap()
}

/// Two-node coupled process `X -> Y`: `X_t = a X_{t-1} + e`,
/// `Y_t = c X_{t-1} + a Y_{t-1} + e`.
pub fn coupled_pair(seed: u64, t: usize, a: f64, c: f64) -> TimeSeries {
    let mut g = rng(seed);
    let ex = normals(&mut g, t + 100);
    let ey = normals(&mut g, t + 100);
    let (mut x, mut y) = (vec![0.0; t + 100], vec![0.0; t + 100]);
    for i in 1..t + 100 {
        x[i] = a * x[i - 1] + ex[i];
        y[i] = c * x[i - 1] + a * y[i - 1] + ey[i];
    }
    TimeSeries::from_columns(vec![x[100..].to_vec(), y[100..].to_vec()]).unwrap()
}

pub fn independent(seed: u64, t: usize, n: usize) -> TimeSeries {
    let mut g = rng(seed);
    TimeSeries::from_columns((0..n).map(|_| normals(&mut g, t)).collect()).unwrap()
}
