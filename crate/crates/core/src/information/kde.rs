//! Resubstitution entropy under a product Gaussian kernel density.
//!
//! Bandwidths follow Silverman's rule per column. The rule's dimension
//! factor is supplied by the caller: for MI and CMI every entropy term uses
//! the dimension of the full joint block, so each column is smoothed by the
//! same kernel in every term and the smoothing cancels for independent
//! columns.

use super::SampleBlock;

const MIN_BANDWIDTH: f64 = 1e-10;

fn std_dev(col: &[f64]) -> f64 {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub(super) fn silverman_bandwidths(x: &SampleBlock, rule_dim: usize) -> Vec<f64> {
    let n = x.rows() as f64;
    let d = rule_dim as f64;
    let factor = (4.0 / ((d + 2.0) * n)).powf(1.0 / (d + 4.0));
    x.columns()
        .iter()
        .map(|c| (std_dev(c) * factor).max(MIN_BANDWIDTH))
        .collect()
}

pub(super) fn entropy(x: &SampleBlock, rule_dim: usize) -> f64 {
    let h = silverman_bandwidths(x, rule_dim);
    let inv_h: Vec<f64> = h.iter().map(|v| 1.0 / v).collect();
    let n = x.rows();
    let d = x.dim();
    let cols = x.columns();
    let log_norm = -(n as f64).ln()
        - h.iter().map(|v| v.ln()).sum::<f64>()
        - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln();

    let mut total = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            let mut q = 0.0;
            for (c, ih) in cols.iter().zip(&inv_h) {
                let u = (c[i] - c[j]) * ih;
                q += u * u;
            }
            s += (-0.5 * q).exp();
        }
        // s >= 1 because the j == i term is included
        total += log_norm + s.ln();
    }
    -total / n as f64
}
