//! Plug-in entropy over empirical frequencies of integer count vectors.

use super::SampleBlock;

pub(super) fn entropy(x: &SampleBlock) -> f64 {
    let n = x.rows();
    let cols = x.columns();
    // counts were validated as nonnegative integers, so the cast is exact
    let mut keys: Vec<Vec<u64>> = (0..n)
        .map(|r| cols.iter().map(|c| c[r] as u64).collect())
        .collect();
    keys.sort_unstable();

    let total = n as f64;
    let mut h = 0.0;
    let mut run = 1usize;
    for w in 1..=n {
        if w < n && keys[w] == keys[w - 1] {
            run += 1;
            continue;
        }
        let p = run as f64 / total;
        h -= p * p.ln();
        run = 1;
    }
    h
}
