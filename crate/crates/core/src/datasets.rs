//! Synthetic time series with known causal structure.
//!
//! Both generators draw a directed Erdős–Rényi coupling graph `A` and then
//! simulate an order-1 process on it, so every ground-truth edge has lag 1.

use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CausalGraph, EdgeRecord};
use crate::series::{default_names, TimeSeries};

pub const DEFAULT_BURN_IN: usize = 100;
/// Base rate of every node in the count process.
pub const POISSON_BASE_RATE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("invalid generator settings: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub rho: f64,
    pub p: f64,
    pub seed: u64,
    pub self_loops: bool,
    pub noise_std: f64,
    pub burn_in: usize,
}

impl SyntheticConfig {
    pub fn new(n: usize, t: usize, rho: f64, p: f64, seed: u64) -> Self {
        SyntheticConfig {
            n,
            t,
            rho,
            p,
            seed,
            self_loops: false,
            noise_std: 1.0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: String| Err(DatasetError::InvalidConfig(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.t < 10 {
            return bad(format!("T must be at least 10, got {}", self.t));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return bad(format!("noise_std must be positive, got {}", self.noise_std));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    pub data: TimeSeries,
    pub truth: CausalGraph,
    /// `weight_matrix[i][j]` couples `x_j(t)` into `x_i(t + 1)`.
    pub weight_matrix: Vec<Vec<f64>>,
}

fn draw_adjacency(cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    (0..cfg.n)
        .map(|i| {
            (0..cfg.n)
                .map(|j| (i != j || cfg.self_loops) && rng.random_bool(cfg.p))
                .collect()
        })
        .collect()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    match Schur::try_new(mat.clone(), f64::EPSILON, 10_000) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
        None => gelfand_radius(mat),
    }
}

/// `lim ||A^k||^(1/k)` by normalized repeated squaring. Used when the QR
/// iteration does not converge, which happens for some defective 0/1
/// matrices.
fn gelfand_radius(mut a: DMatrix<f64>) -> f64 {
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..60 {
        let norm = a.norm();
        if norm == 0.0 {
            return 0.0;
        }
        a /= norm;
        log_scale += norm.ln() / power;
        a = &a * &a;
        power *= 2.0;
    }
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (log_scale + norm.ln() / power).exp()
}

fn truth_from_weights(w: &[Vec<f64>]) -> CausalGraph {
    let n = w.len();
    let mut g = CausalGraph::new(n);
    for (i, row) in w.iter().enumerate() {
        for (j, &wij) in row.iter().enumerate() {
            if wij != 0.0 {
                g.add_edge(EdgeRecord {
                    source: j,
                    sink: i,
                    lag: 1,
                    cmi: 0.0,
                    p_value: 1.0,
                })
                .expect("weight support forms a simple graph");
            }
        }
    }
    g
}

/// Linear VAR(1) `x(t+1) = W x(t) + e(t)` on an Erdős–Rényi graph, with
/// `W = rho A / max(1, spectral_radius(A))` so the process is stationary.
pub fn linear_stochastic_gaussian_process(
    cfg: &SyntheticConfig,
) -> Result<SyntheticInstance, DatasetError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let adj = draw_adjacency(cfg, &mut rng);
    let a: Vec<Vec<f64>> = adj
        .iter()
        .map(|r| r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = cfg.rho / spectral_radius(&a).max(1.0);
    let w: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|v| v * scale).collect())
        .collect();

    let noise = Normal::new(0.0, cfg.noise_std).expect("validated noise_std");
    let n = cfg.n;
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut columns = vec![Vec::with_capacity(cfg.t); n];
    for step in 0..cfg.burn_in + cfg.t {
        for i in 0..n {
            let drive: f64 = w[i].iter().zip(&x).map(|(wij, xj)| wij * xj).sum();
            next[i] = drive + noise.sample(&mut rng);
        }
        std::mem::swap(&mut x, &mut next);
        if step >= cfg.burn_in {
            for (c, &v) in columns.iter_mut().zip(&x) {
                c.push(v);
            }
        }
    }

    Ok(SyntheticInstance {
        data: TimeSeries::from_columns(columns)
            .expect("rectangular by construction")
            .with_names(default_names(n))
            .expect("name count matches"),
        truth: truth_from_weights(&w),
        weight_matrix: w,
    })
}

/// Count process `x_i(t+1) ~ Poisson(l (1 + rho sum_j A_ij x_j / (1 + x_j)))`
/// with base rate `l = 3`. The saturating coupling keeps rates bounded.
pub fn poisson_count_process(cfg: &SyntheticConfig) -> Result<SyntheticInstance, DatasetError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let adj = draw_adjacency(cfg, &mut rng);
    let w: Vec<Vec<f64>> = adj
        .iter()
        .map(|r| r.iter().map(|&b| if b { cfg.rho } else { 0.0 }).collect())
        .collect();

    let n = cfg.n;
    let mut x = vec![0.0_f64; n];
    let mut next = vec![0.0_f64; n];
    let mut columns = vec![Vec::with_capacity(cfg.t); n];
    for step in 0..cfg.burn_in + cfg.t {
        for i in 0..n {
            let drive: f64 = w[i]
                .iter()
                .zip(&x)
                .map(|(wij, xj)| wij * xj / (1.0 + xj))
                .sum();
            let rate = POISSON_BASE_RATE * (1.0 + drive);
            next[i] = Poisson::new(rate).expect("positive finite rate").sample(&mut rng);
        }
        std::mem::swap(&mut x, &mut next);
        if step >= cfg.burn_in {
            for (c, &v) in columns.iter_mut().zip(&x) {
                c.push(v);
            }
        }
    }

    Ok(SyntheticInstance {
        data: TimeSeries::from_columns(columns).expect("rectangular by construction"),
        truth: truth_from_weights(&w),
        weight_matrix: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gelfand_matches_known_radii() {
        let m = |rows: &[&[f64]]| DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j]);
        assert!((gelfand_radius(m(&[&[0.0, 1.0], &[1.0, 0.0]])) - 1.0).abs() < 1e-9);
        assert_eq!(gelfand_radius(m(&[&[0.0, 1.0], &[0.0, 0.0]])), 0.0);
        assert!((gelfand_radius(m(&[&[2.0, 1.0], &[0.0, 3.0]])) - 3.0).abs() < 1e-9);
        let rot = m(&[&[0.0, -0.5], &[0.5, 0.0]]);
        assert!((gelfand_radius(rot) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn radius_agrees_on_random_adjacency() {
        for seed in 0..200 {
            let cfg = SyntheticConfig::new(5, 10, 0.7, 0.3, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let adj = draw_adjacency(&cfg, &mut rng);
            let a = DMatrix::from_fn(5, 5, |i, j| if adj[i][j] { 1.0 } else { 0.0 });
            let rows: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| a[(i, j)]).collect()).collect();
            let r = spectral_radius(&rows);
            // defective zero eigenvalues are only resolved to about eps^(1/n) by QR
            assert!((r - gelfand_radius(a)).abs() < 1e-2, "seed {seed}: {r}");
        }
    }

    fn variance(c: &[f64]) -> f64 {
        let m = c.iter().sum::<f64>() / c.len() as f64;
        c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (c.len() - 1) as f64
    }

    #[test]
    fn listing_parameters_shape() {
        let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(5, 1000, 0.7, 0.2, 11)).unwrap();
        assert_eq!(inst.data.n_rows(), 1000);
        assert_eq!(inst.data.n_vars(), 5);
        assert!(inst.truth.edges().iter().all(|e| e.lag == 1 && e.source != e.sink));
        assert!(spectral_radius(&inst.weight_matrix) <= 0.7 + 1e-9);
    }

    #[test]
    fn edge_count_follows_binomial_mean() {
        let total: usize = (0..400)
            .map(|s| {
                linear_stochastic_gaussian_process(&SyntheticConfig::new(5, 10, 0.7, 0.2, s))
                    .unwrap()
                    .truth
                    .edge_count()
            })
            .sum();
        // Binomial(20, 0.2) has mean 4 and sd 1.79; 400 draws give sd 0.09 on the mean
        let mean = total as f64 / 400.0;
        assert!((mean - 4.0).abs() < 0.4, "mean edge count {mean}");
    }

    #[test]
    fn no_coupling_gives_white_noise() {
        let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(4, 5000, 0.7, 0.0, 3)).unwrap();
        assert!(inst.truth.is_empty());
        assert!(inst.weight_matrix.iter().flatten().all(|&w| w == 0.0));
        for j in 0..4 {
            let v = variance(inst.data.column(j));
            assert!((v - 1.0).abs() < 0.08, "variance {v}");
        }
    }

    #[test]
    fn full_coupling_without_self_loops() {
        let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(5, 100, 0.7, 1.0, 3)).unwrap();
        assert_eq!(inst.truth.edge_count(), 20);
        assert!(inst.truth.edges().iter().all(|e| e.source != e.sink));
        // spectral radius of J - I is n - 1 = 4
        let expect = 0.7 / 4.0;
        assert!((inst.weight_matrix[0][1] - expect).abs() < 1e-12);
    }

    #[test]
    fn self_loops_flag() {
        let mut cfg = SyntheticConfig::new(3, 50, 0.5, 1.0, 1);
        cfg.self_loops = true;
        let inst = linear_stochastic_gaussian_process(&cfg).unwrap();
        assert_eq!(inst.truth.edge_count(), 9);
    }

    #[test]
    fn truth_matches_weight_support() {
        for seed in 0..30 {
            let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(6, 20, 0.6, 0.3, seed)).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(inst.weight_matrix[i][j] != 0.0, inst.truth.contains(j, i, 1));
                }
            }
        }
    }

    #[test]
    fn stable_at_extreme_coupling() {
        let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(6, 5000, 0.99, 1.0, 2)).unwrap();
        for j in 0..6 {
            let c = inst.data.column(j);
            assert!(c.iter().all(|v| v.is_finite()));
            // stationary variance of a VAR(1) with spectral radius 0.99 stays moderate
            assert!(variance(c) < 100.0);
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = SyntheticConfig::new(5, 200, 0.7, 0.2, 42);
        assert_eq!(
            linear_stochastic_gaussian_process(&cfg).unwrap(),
            linear_stochastic_gaussian_process(&cfg).unwrap()
        );
        assert_eq!(poisson_count_process(&cfg).unwrap(), poisson_count_process(&cfg).unwrap());
    }

    #[test]
    fn burn_in_length_does_not_change_stationary_variance() {
        let mut short = SyntheticConfig::new(5, 20_000, 0.9, 0.4, 8);
        let mut long = short;
        short.burn_in = 100;
        long.burn_in = 500;
        let a = linear_stochastic_gaussian_process(&short).unwrap();
        let b = linear_stochastic_gaussian_process(&long).unwrap();
        for j in 0..5 {
            let (va, vb) = (variance(a.data.column(j)), variance(b.data.column(j)));
            assert!((va - vb).abs() / va < 0.10, "column {j}: {va} vs {vb}");
        }
    }

    #[test]
    fn invalid_configs() {
        let base = SyntheticConfig::new(5, 100, 0.7, 0.2, 0);
        for cfg in [
            SyntheticConfig { rho: 1.5, ..base },
            SyntheticConfig { rho: 0.0, ..base },
            SyntheticConfig { p: -0.1, ..base },
            SyntheticConfig { n: 1, ..base },
            SyntheticConfig { t: 5, ..base },
            SyntheticConfig { noise_std: 0.0, ..base },
        ] {
            assert!(linear_stochastic_gaussian_process(&cfg).is_err());
            assert!(poisson_count_process(&cfg).is_err());
        }
    }

    #[test]
    fn poisson_base_rate_and_support() {
        let inst = poisson_count_process(&SyntheticConfig::new(3, 10_000, 0.7, 0.0, 5)).unwrap();
        assert!(inst.truth.is_empty());
        for j in 0..3 {
            let c = inst.data.column(j);
            assert!(c.iter().all(|v| *v >= 0.0 && v.fract() == 0.0));
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            assert!((mean - 3.0).abs() < 0.1, "mean {mean}");
        }
    }
}
