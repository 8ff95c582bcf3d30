//! Optimal causation entropy network discovery.
//!
//! For each target node the forward pass greedily aggregates lagged
//! candidates by maximal conditional mutual information, gated by a shuffle
//! test, and the backward pass prunes candidates that lose significance once
//! conditioned on the rest. Targets are independent and run in parallel.
//! Every shuffle test draws its permutations from RNG substreams keyed by
//! `(seed, target, candidate, pass, iteration, permutation)`, so results do
//! not depend on the thread count.

mod embedding;
mod passes;
mod shuffle;

pub use embedding::{build_lag_embedding, Candidate, LagEmbedding};
pub use passes::{
    backward_pass, candidate_pool, forward_pass, parents_of, BackwardMode, ForwardGate, Selection,
};
pub use shuffle::{
    candidate_cmi, max_statistic_test, permutation_p_value, shuffle_test, substream, Pass, ShuffleTestResult, TestKey,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CausalGraph, EdgeRecord};
use crate::information::{
    conditional_mutual_information, EstimatorKind, EstimatorSpec, InformationError, SampleBlock,
};
use crate::par;
use crate::series::TimeSeries;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_PERMUTATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscoveryError {
    #[error("series has {rows} rows; max_lag {max_lag} needs more than {}", max_lag + 1)]
    SeriesTooShort { rows: usize, max_lag: usize },
    #[error("non-finite value at row {row}, column {column}")]
    NonFiniteInput { row: usize, column: usize },
    #[error("at least 2 variables are required, found {0}")]
    TooFewVariables(usize),
    #[error("invalid discovery settings: {0}")]
    InvalidConfig(String),
    #[error("estimator failed for target {target}{}: {source}", candidate.map(|c| format!(", candidate {c}")).unwrap_or_default())]
    Estimator {
        target: usize,
        candidate: Option<Candidate>,
        source: InformationError,
    },
}

impl DiscoveryError {
    pub(crate) fn estimator(target: usize, candidate: Option<Candidate>, source: InformationError) -> Self {
        DiscoveryError::Estimator {
            target,
            candidate,
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub estimator: EstimatorSpec,
    pub alpha_forward: f64,
    pub alpha_backward: f64,
    pub permutations: usize,
    pub max_lag: usize,
    pub seed: u64,
    pub standardize: bool,
    pub include_self: bool,
    #[serde(default)]
    pub forward_gate: ForwardGate,
    #[serde(default)]
    pub backward_mode: BackwardMode,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            estimator: EstimatorSpec::gaussian(),
            alpha_forward: DEFAULT_ALPHA,
            alpha_backward: DEFAULT_ALPHA,
            permutations: DEFAULT_PERMUTATIONS,
            max_lag: 1,
            seed: 0,
            standardize: true,
            include_self: true,
            forward_gate: ForwardGate::MaxStatistic,
            backward_mode: BackwardMode::SingleSweep,
        }
    }
}

impl DiscoveryConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_estimator(mut self, estimator: EstimatorSpec) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn validate(&self) -> Result<(), DiscoveryError> {
        let bad = |m: String| Err(DiscoveryError::InvalidConfig(m));
        for (name, a) in [("alpha_forward", self.alpha_forward), ("alpha_backward", self.alpha_backward)] {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {a}"));
            }
        }
        if self.permutations == 0 {
            return bad("permutations must be at least 1".into());
        }
        if self.max_lag == 0 {
            return bad("max_lag must be at least 1".into());
        }
        self.estimator
            .validate()
            .map_err(|e| DiscoveryError::InvalidConfig(e.to_string()))
    }

    /// Count estimators need the raw integers, so they are never rescaled.
    fn rescales(&self) -> bool {
        self.standardize && self.estimator.kind != EstimatorKind::Poisson
    }
}

/// Lag embedding exactly as [`discover_network`] sees it.
pub fn prepare_embedding(data: &TimeSeries, config: &DiscoveryConfig) -> Result<LagEmbedding, DiscoveryError> {
    config.validate()?;
    if data.n_vars() < 2 {
        return Err(DiscoveryError::TooFewVariables(data.n_vars()));
    }
    if let Some((row, column)) = data.first_non_finite() {
        return Err(DiscoveryError::NonFiniteInput { row, column });
    }
    let emb = build_lag_embedding(data, config.max_lag)?;
    Ok(if config.rescales() { emb.standardized() } else { emb })
}

/// Parent sets of every target, in node order.
pub fn discover_parents(
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
) -> Result<Vec<Vec<Selection>>, DiscoveryError> {
    let per_target = par::map_indexed(embedding.n_vars(), |target| parents_of(target, embedding, config));
    per_target.into_iter().collect()
}

/// Runs forward and backward passes for every node and assembles the
/// lag-resolved causal graph. Edge attributes come from the final backward
/// test of each surviving link.
pub fn discover_network(data: &TimeSeries, config: &DiscoveryConfig) -> Result<CausalGraph, DiscoveryError> {
    let embedding = prepare_embedding(data, config)?;
    let parents = discover_parents(&embedding, config)?;
    let mut graph = CausalGraph::with_names(data.names().to_vec());
    for (sink, selections) in parents.iter().enumerate() {
        for s in selections {
            graph
                .add_edge(EdgeRecord {
                    source: s.candidate.variable,
                    sink,
                    lag: s.candidate.lag,
                    cmi: s.test.observed_cmi,
                    p_value: s.test.p_value,
                })
                .expect("candidates are unique per target");
        }
    }
    Ok(graph)
}

/// Transfer entropy `source(t - lag) -> target(t)`: the causation entropy
/// conditioned on the target's own past at lags `1..=max_lag`.
pub fn transfer_entropy(
    source: usize,
    target: usize,
    lag: usize,
    embedding: &LagEmbedding,
    spec: &EstimatorSpec,
) -> Result<f64, DiscoveryError> {
    if source >= embedding.n_vars() || target >= embedding.n_vars() {
        return Err(DiscoveryError::InvalidConfig(format!(
            "node index out of range for {} variables",
            embedding.n_vars()
        )));
    }
    if lag == 0 || lag > embedding.max_lag() {
        return Err(DiscoveryError::InvalidConfig(format!(
            "lag {lag} outside 1..={}",
            embedding.max_lag()
        )));
    }
    let candidate = Candidate::new(source, lag);
    let history: Vec<&[f64]> = (1..=embedding.max_lag())
        .map(|l| embedding.candidate_column(Candidate::new(target, l)))
        .collect();
    let x = SampleBlock::single(embedding.candidate_column(candidate));
    let y = SampleBlock::single(embedding.target_column(target));
    let z = SampleBlock::new(history).map_err(|e| DiscoveryError::estimator(target, Some(candidate), e))?;
    conditional_mutual_information(&x, &y, &z, spec)
        .map_err(|e| DiscoveryError::estimator(target, Some(candidate), e))
}
