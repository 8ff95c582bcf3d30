use serde::{Deserialize, Serialize};

use super::DiscoveryError;
use crate::series::TimeSeries;

/// A lagged predictor: variable `variable` observed `lag` steps before the
/// target's future value. Ordered lexicographically by `(variable, lag)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub variable: usize,
    pub lag: usize,
}

impl Candidate {
    pub fn new(variable: usize, lag: usize) -> Self {
        Candidate { variable, lag }
    }
}

impl std::fmt::Display for Candidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "X{}(t-{})", self.variable, self.lag)
    }
}

/// Aligned candidate and target columns for an order-`max_lag` analysis.
///
/// With `T` rows the effective length is `T - max_lag`. The candidate
/// `(j, lag)` takes rows `max_lag - lag ..= T - 1 - lag` of variable `j`, and
/// every target future column takes rows `max_lag ..= T - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagEmbedding {
    n_vars: usize,
    max_lag: usize,
    t_eff: usize,
    /// Indexed by `variable * max_lag + (lag - 1)`.
    lagged: Vec<Vec<f64>>,
    future: Vec<Vec<f64>>,
}

pub fn build_lag_embedding(data: &TimeSeries, max_lag: usize) -> Result<LagEmbedding, DiscoveryError> {
    let t = data.n_rows();
    if max_lag == 0 {
        return Err(DiscoveryError::InvalidConfig("max_lag must be at least 1".into()));
    }
    if t <= max_lag + 1 {
        return Err(DiscoveryError::SeriesTooShort { rows: t, max_lag });
    }
    let t_eff = t - max_lag;
    let mut lagged = Vec::with_capacity(data.n_vars() * max_lag);
    let mut future = Vec::with_capacity(data.n_vars());
    for j in 0..data.n_vars() {
        let col = data.column(j);
        for lag in 1..=max_lag {
            lagged.push(col[max_lag - lag..t - lag].to_vec());
        }
        future.push(col[max_lag..].to_vec());
    }
    Ok(LagEmbedding {
        n_vars: data.n_vars(),
        max_lag,
        t_eff,
        lagged,
        future,
    })
}

fn zscore(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    // constant columns are only centered
    let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
    for v in col.iter_mut() {
        *v = (*v - mean) * scale;
    }
}

impl LagEmbedding {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    /// Common length of every column view.
    pub fn t_eff(&self) -> usize {
        self.t_eff
    }

    /// All `n_vars * max_lag` candidates in `(variable, lag)` order.
    pub fn candidates(&self) -> Vec<Candidate> {
        (0..self.n_vars)
            .flat_map(|v| (1..=self.max_lag).map(move |l| Candidate::new(v, l)))
            .collect()
    }

    pub fn candidate_column(&self, c: Candidate) -> &[f64] {
        assert!(c.lag >= 1 && c.lag <= self.max_lag && c.variable < self.n_vars);
        &self.lagged[c.variable * self.max_lag + c.lag - 1]
    }

    pub fn target_column(&self, target: usize) -> &[f64] {
        &self.future[target]
    }

    /// Z-scores every view over its `t_eff` rows.
    pub fn standardized(mut self) -> Self {
        for col in self.lagged.iter_mut().chain(self.future.iter_mut()) {
            zscore(col);
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(t: usize, n: usize) -> TimeSeries {
        TimeSeries::from_columns(
            (0..n)
                .map(|j| (0..t).map(|i| (100 * j + i) as f64).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_lag_window() {
        let emb = build_lag_embedding(&ramp(1000, 5), 1).unwrap();
        assert_eq!(emb.t_eff(), 999);
        assert_eq!(emb.candidates().len(), 5);
        for c in emb.candidates() {
            assert_eq!(emb.candidate_column(c).len(), 999);
        }
        for i in 0..5 {
            assert_eq!(emb.target_column(i).len(), 999);
        }
    }

    #[test]
    fn three_lags() {
        let data = ramp(1000, 5);
        let emb = build_lag_embedding(&data, 3).unwrap();
        assert_eq!(emb.t_eff(), 997);
        assert_eq!(emb.candidates().len(), 15);
        // row r of the (j, lag) view is x_j(max_lag + r - lag)
        let c = Candidate::new(2, 3);
        assert_eq!(emb.candidate_column(c)[0], data.value(0, 2));
        assert_eq!(emb.candidate_column(Candidate::new(2, 1))[0], data.value(2, 2));
        assert_eq!(emb.target_column(2)[0], data.value(3, 2));
        assert_eq!(*emb.target_column(2).last().unwrap(), data.value(999, 2));
        assert_eq!(*emb.candidate_column(Candidate::new(2, 1)).last().unwrap(), data.value(998, 2));
    }

    #[test]
    fn too_short() {
        assert_eq!(
            build_lag_embedding(&ramp(2, 3), 2),
            Err(DiscoveryError::SeriesTooShort { rows: 2, max_lag: 2 })
        );
        assert!(build_lag_embedding(&ramp(3, 3), 2).is_err());
        assert!(build_lag_embedding(&ramp(4, 3), 2).is_ok());
    }

    #[test]
    fn candidate_order_is_lexicographic() {
        let emb = build_lag_embedding(&ramp(10, 2), 2).unwrap();
        let cs = emb.candidates();
        let mut sorted = cs.clone();
        sorted.sort();
        assert_eq!(cs, sorted);
        assert_eq!(cs[1], Candidate::new(0, 2));
    }

    #[test]
    fn standardized_views() {
        let emb = build_lag_embedding(&ramp(50, 2), 1).unwrap().standardized();
        let col = emb.target_column(1);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (col.len() - 1) as f64;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);

        let flat = TimeSeries::from_columns(vec![vec![2.0; 10], vec![1.0; 10]]).unwrap();
        let emb = build_lag_embedding(&flat, 1).unwrap().standardized();
        assert!(emb.target_column(0).iter().all(|&v| v == 0.0));
    }
}
