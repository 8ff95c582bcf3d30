//! Nearest-neighbor estimators under the max-norm.
//!
//! Entropy is the Kozachenko-Leonenko estimate. Mutual information and
//! conditional mutual information use the KSG (algorithm 1) and
//! Frenzel-Pompe joint-space formulations: the k-th neighbor radius is taken
//! in the full joint space and reused for strict-inequality counts in each
//! marginal space, so the marginal biases largely cancel.

use statrs::function::gamma::digamma;

use super::kdtree::{KdTree, Metric};
use super::{row_major, SampleBlock};

/// Radii of exactly zero would send `ln` to -inf on duplicated samples.
const MIN_RADIUS: f64 = f64::MIN_POSITIVE;

fn kth_radii(tree: &KdTree, k: usize) -> Vec<f64> {
    (0..tree.len()).map(|i| tree.kth_distance(i, k)).collect()
}

fn mean_digamma_counts(tree: &KdTree, radii: &[f64]) -> f64 {
    let n = radii.len() as f64;
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| digamma(tree.count_within(i, r) as f64 + 1.0))
        .sum::<f64>()
        / n
}

pub(super) fn entropy(x: &SampleBlock, k: usize) -> f64 {
    let (pts, d) = row_major(&[x]);
    let tree = KdTree::new(&pts, d, Metric::Chebyshev);
    let n = x.rows() as f64;
    let mean_log_diam = kth_radii(&tree, k)
        .iter()
        .map(|&r| (2.0 * r.max(MIN_RADIUS)).ln())
        .sum::<f64>()
        / n;
    digamma(n) - digamma(k as f64) + d as f64 * mean_log_diam
}

pub(super) fn mutual_information(x: &SampleBlock, y: &SampleBlock, k: usize) -> f64 {
    let (joint, dj) = row_major(&[x, y]);
    let (px, dx) = row_major(&[x]);
    let (py, dy) = row_major(&[y]);
    let radii = kth_radii(&KdTree::new(&joint, dj, Metric::Chebyshev), k);
    let tx = KdTree::new(&px, dx, Metric::Chebyshev);
    let ty = KdTree::new(&py, dy, Metric::Chebyshev);
    let n = x.rows() as f64;
    digamma(k as f64) + digamma(n) - mean_digamma_counts(&tx, &radii) - mean_digamma_counts(&ty, &radii)
}

pub(super) fn conditional_mutual_information(
    x: &SampleBlock,
    y: &SampleBlock,
    z: &SampleBlock,
    k: usize,
) -> f64 {
    let (joint, dj) = row_major(&[x, y, z]);
    let (pxz, dxz) = row_major(&[x, z]);
    let (pyz, dyz) = row_major(&[y, z]);
    let (pz, dz) = row_major(&[z]);
    let radii = kth_radii(&KdTree::new(&joint, dj, Metric::Chebyshev), k);
    let txz = KdTree::new(&pxz, dxz, Metric::Chebyshev);
    let tyz = KdTree::new(&pyz, dyz, Metric::Chebyshev);
    let tz = KdTree::new(&pz, dz, Metric::Chebyshev);
    digamma(k as f64) - mean_digamma_counts(&txz, &radii) - mean_digamma_counts(&tyz, &radii)
        + mean_digamma_counts(&tz, &radii)
}
