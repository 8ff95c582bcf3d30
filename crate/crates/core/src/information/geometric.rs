//! Geometric k-nearest-neighbor entropy.
//!
//! Each point's Euclidean kNN ball is replaced by an ellipsoid aligned with
//! the principal axes of its local neighborhood (the point plus its k
//! neighbors). The major semi-axis equals the k-th neighbor distance and the
//! others shrink in proportion to the local standard deviations. The number
//! of neighbors inside the ellipsoid replaces k in the digamma term, so each
//! point contributes the Kozachenko-Leonenko term plus a log-volume and count
//! correction `delta_i`.
//!
//! On locally isotropic data the raw correction is not centered: shape
//! estimates from k points are noisy, and the ellipsoid always looks
//! anisotropic. Its mean under a locally uniform neighborhood depends only on
//! `(d, k)`. That constant is computed once per `(d, k)` from a fixed
//! reference sample and subtracted, so the estimate coincides with
//! Kozachenko-Leonenko in expectation where the density is locally flat and
//! departs from it where the neighborhood is genuinely elongated.
//!
//! Neighborhoods whose covariance is rank deficient (always the case when
//! the dimension exceeds k) get no correction. In one dimension the
//! ellipsoid is the ball and the estimator is exactly Kozachenko-Leonenko.
//! Mutual information and conditional mutual information are formed from
//! entropy sums by the caller.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::{digamma, ln_gamma};

use super::kdtree::{KdTree, Metric};
use super::{row_major, SampleBlock};

/// Relative eigenvalue floor below which a neighborhood counts as flat.
const FLAT_RATIO: f64 = 1e-10;
const INSIDE_SLACK: f64 = 1e-9;
const REFERENCE_DRAWS: usize = 100_000;
const REFERENCE_SEED: u64 = 0x6b6e_6e5f_6765_6f6d;

/// `delta` for a neighborhood given as offsets from the query point, sorted
/// by distance. `None` when the neighborhood is flat.
fn correction(offsets: &[Vec<f64>], d: usize) -> Option<f64> {
    let k = offsets.len();
    let eps = offsets.last().map(|o| o.iter().map(|v| v * v).sum::<f64>().sqrt())?;
    if d == 1 || d > k || eps.is_nan() || eps <= 0.0 {
        return None;
    }
    let m = (k + 1) as f64;
    let mut mean = vec![0.0; d];
    for o in offsets {
        for (acc, v) in mean.iter_mut().zip(o) {
            *acc += v / m;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    let origin = vec![0.0; d];
    for p in std::iter::once(&origin).chain(offsets) {
        for a in 0..d {
            for b in 0..d {
                cov[(a, b)] += (p[a] - mean[a]) * (p[b] - mean[b]) / (m - 1.0);
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    if lmax.is_nan() || lmax <= 0.0 || lmin <= FLAT_RATIO * lmax {
        return None;
    }
    let rel: Vec<f64> = eig.eigenvalues.iter().map(|&l| (l / lmax).sqrt()).collect();
    let inside = offsets
        .iter()
        .filter(|o| {
            let q: f64 = (0..d)
                .map(|c| {
                    let axis = eig.eigenvectors.column(c);
                    let proj: f64 = (0..d).map(|a| o[a] * axis[a]).sum();
                    (proj / (eps * rel[c])).powi(2)
                })
                .sum();
            q <= 1.0 + INSIDE_SLACK
        })
        .count()
        .max(1);
    let ln_shrink: f64 = rel.iter().map(|r| r.ln()).sum();
    Some(ln_shrink - digamma(inside as f64) + digamma(k as f64))
}

/// Mean correction over neighborhoods of a homogeneous point process: k-1
/// neighbors uniform in the unit ball and the k-th on its boundary.
fn reference_bias(d: usize, k: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(REFERENCE_SEED ^ ((d as u64) << 32) ^ k as u64);
    let direction = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    };
    let mut total = 0.0;
    for _ in 0..REFERENCE_DRAWS {
        let mut offsets: Vec<(f64, Vec<f64>)> = (0..k - 1)
            .map(|_| {
                let r = rand::Rng::random::<f64>(&mut rng).powf(1.0 / d as f64);
                let u = direction(&mut rng);
                (r, u.into_iter().map(|x| x * r).collect())
            })
            .collect();
        offsets.push((1.0, direction(&mut rng)));
        offsets.sort_by(|a, b| a.0.total_cmp(&b.0));
        let offsets: Vec<Vec<f64>> = offsets.into_iter().map(|(_, o)| o).collect();
        total += correction(&offsets, d).unwrap_or(0.0);
    }
    total / REFERENCE_DRAWS as f64
}

/// Memoized [`reference_bias`]; a pure function of `(d, k)`.
fn centering(d: usize, k: usize) -> f64 {
    if d == 1 || d > k {
        return 0.0;
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&b) = cache.lock().expect("cache lock").get(&(d, k)) {
        return b;
    }
    let b = reference_bias(d, k);
    *cache.lock().expect("cache lock").entry((d, k)).or_insert(b)
}

fn ln_unit_ball(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)
}

pub(super) fn entropy(x: &SampleBlock, k: usize) -> f64 {
    let (pts, d) = row_major(&[x]);
    let tree = KdTree::new(&pts, d, Metric::Euclidean);
    let n = x.rows();
    let (mut log_radius, mut delta) = (0.0, 0.0);
    for i in 0..n {
        let nbrs = tree.nearest(i, k);
        let eps = nbrs.last().map_or(0.0, |p| p.0).max(f64::MIN_POSITIVE);
        log_radius += eps.ln();
        if d > 1 && d <= k {
            let center = tree.point(i);
            let offsets: Vec<Vec<f64>> = nbrs
                .iter()
                .map(|&(_, j)| tree.point(j).iter().zip(center).map(|(p, c)| p - c).collect())
                .collect();
            delta += correction(&offsets, d).unwrap_or(0.0);
        }
    }
    let nf = n as f64;
    digamma(nf) - digamma(k as f64) + ln_unit_ball(d) + d as f64 * log_radius / nf + delta / nf - centering(d, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((ln_unit_ball(1) - 2.0_f64.ln()).abs() < 1e-12);
        assert!((ln_unit_ball(2) - std::f64::consts::PI.ln()).abs() < 1e-12);
        let v3 = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((ln_unit_ball(3) - v3.ln()).abs() < 1e-12);
    }

    #[test]
    fn one_dimension_reduces_to_kozachenko_leonenko() {
        let xs: Vec<f64> = (0..300).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
        let b = SampleBlock::single(&xs);
        let (geo, kl) = (entropy(&b, 4), super::super::knn::entropy(&b, 4));
        assert!((geo - kl).abs() < 1e-12, "{geo} vs {kl}");
    }

    #[test]
    fn reference_bias_shrinks_with_k() {
        let b4 = centering(2, 4);
        let b16 = centering(2, 16);
        assert!(b4 > 0.1 && b16.abs() < 0.1 * b4, "{b4} {b16}");
        assert_eq!(centering(2, 4).to_bits(), b4.to_bits());
        assert_eq!(centering(5, 4), 0.0);
    }

    #[test]
    fn flat_neighborhood_has_no_correction() {
        let offsets = vec![vec![1.0, 0.0], vec![-2.0, 0.0], vec![3.0, 0.0]];
        assert_eq!(correction(&offsets, 2), None);
        let round = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let c = correction(&round, 2).unwrap();
        // nearly isotropic: axes equal, all four on the boundary
        assert!(c.abs() < 1e-6, "{c}");
    }
}
