use std::collections::BTreeSet;

use serde::Serialize;

use super::{CausalGraph, GraphError};

/// Edge-set comparison of a recovered graph against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        // 0/0 counts as perfect for precision and recall
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalReport {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.false_positives == 0 && self.false_negatives == 0
    }
}

fn keys(g: &CausalGraph, ignore_lags: bool) -> BTreeSet<(usize, usize, usize)> {
    g.edges()
        .iter()
        .map(|e| (e.source, e.sink, if ignore_lags { 0 } else { e.lag }))
        .collect()
}

/// Compares `(source, sink, lag)` triples, or `(source, sink)` pairs when
/// `ignore_lags` is set.
pub fn evaluate(
    predicted: &CausalGraph,
    truth: &CausalGraph,
    ignore_lags: bool,
) -> Result<EvalReport, GraphError> {
    if predicted.n_nodes() != truth.n_nodes() {
        return Err(GraphError::NodeCountMismatch {
            predicted: predicted.n_nodes(),
            truth: truth.n_nodes(),
        });
    }
    let p = keys(predicted, ignore_lags);
    let t = keys(truth, ignore_lags);
    let tp = p.intersection(&t).count();
    Ok(EvalReport::from_counts(tp, p.len() - tp, t.len() - tp))
}
