//! Forward selection and backward pruning of one target's parents.

use serde::{Deserialize, Serialize};

use super::embedding::{Candidate, LagEmbedding};
use super::shuffle::{candidate_cmi, max_statistic_test, shuffle_test, Pass, ShuffleTestResult, TestKey};
use super::{DiscoveryConfig, DiscoveryError};
use crate::par;

/// An accepted candidate together with the test that admitted it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub candidate: Candidate,
    pub test: ShuffleTestResult,
    /// Candidates the test conditioned on, in acceptance order.
    pub conditioning: Vec<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackwardMode {
    /// One pruning sweep in acceptance order, then re-test any survivor whose
    /// conditioning set changed after its test.
    #[default]
    SingleSweep,
    /// Repeat full sweeps until one removes nothing.
    Fixpoint,
}

/// Significance gate applied to each greedy forward step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForwardGate {
    /// Shuffle test of the argmax candidate alone.
    Argmax,
    /// Compare the step's maximal CMI against the maximum over all remaining
    /// candidates under a shared row permutation.
    #[default]
    MaxStatistic,
}

/// The candidate pool for `target` under `config`.
pub fn candidate_pool(target: usize, embedding: &LagEmbedding, config: &DiscoveryConfig) -> Vec<Candidate> {
    embedding
        .candidates()
        .into_iter()
        .filter(|c| config.include_self || c.variable != target)
        .collect()
}

fn run_test(
    candidate: Candidate,
    target: usize,
    conditioning: Vec<Candidate>,
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
    pass: Pass,
    iteration: u64,
) -> Result<Selection, DiscoveryError> {
    let key = TestKey {
        target,
        candidate,
        pass,
        iteration,
    };
    let test = shuffle_test(candidate, target, &conditioning, embedding, config, &key)
        .map_err(|e| DiscoveryError::estimator(target, Some(candidate), e))?;
    Ok(Selection {
        candidate,
        test,
        conditioning,
    })
}

/// Index of the largest value; ties go to the earliest index.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Greedy aggregation: repeatedly take the remaining candidate with the
/// largest CMI given the selected set, keep it while its shuffle test
/// passes at `alpha_forward`.
pub fn forward_pass(
    target: usize,
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
) -> Result<Vec<Selection>, DiscoveryError> {
    let mut remaining = candidate_pool(target, embedding, config);
    let mut accepted: Vec<Selection> = Vec::new();
    let mut selected: Vec<Candidate> = Vec::new();

    for iteration in 0.. {
        if remaining.is_empty() {
            break;
        }
        let scores: Vec<Result<f64, DiscoveryError>> = par::map_indexed(remaining.len(), |i| {
            let c = remaining[i];
            candidate_cmi(
                embedding.candidate_column(c),
                target,
                &selected,
                embedding,
                config,
            )
            .map_err(|e| DiscoveryError::estimator(target, Some(c), e))
        });
        let scores = scores.into_iter().collect::<Result<Vec<f64>, _>>()?;
        let Some(best) = argmax(&scores) else { break };
        let candidate = remaining[best];

        let sel = match config.forward_gate {
            ForwardGate::Argmax => run_test(
                candidate,
                target,
                selected.clone(),
                embedding,
                config,
                Pass::Forward,
                iteration,
            )?,
            ForwardGate::MaxStatistic => {
                let key = TestKey {
                    target,
                    candidate,
                    pass: Pass::Forward,
                    iteration,
                };
                let test = max_statistic_test(&remaining, target, &selected, embedding, config, &key)
                    .map_err(|e| DiscoveryError::estimator(target, Some(candidate), e))?;
                Selection {
                    candidate,
                    test,
                    conditioning: selected.clone(),
                }
            }
        };
        if sel.test.p_value > config.alpha_forward {
            break;
        }
        remaining.remove(best);
        selected.push(candidate);
        accepted.push(sel);
    }
    Ok(accepted)
}

fn others(survivors: &[Candidate], c: Candidate) -> Vec<Candidate> {
    survivors.iter().copied().filter(|&s| s != c).collect()
}

/// Prunes `selected` (in acceptance order): each candidate is re-tested
/// against all other current survivors and dropped when its p-value exceeds
/// `alpha_backward`. Survivors come back in acceptance order with tests
/// conditioned on exactly the other survivors.
pub fn backward_pass(
    target: usize,
    selected: &[Candidate],
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
) -> Result<Vec<Selection>, DiscoveryError> {
    let mut survivors: Vec<Candidate> = selected.to_vec();
    let mut latest: Vec<Option<Selection>> = vec![None; selected.len()];
    let mut sweep: u64 = 0;

    loop {
        let mut removed = false;
        for (slot, &c) in selected.iter().enumerate() {
            if !survivors.contains(&c) {
                continue;
            }
            let cond = others(&survivors, c);
            let fresh = match (&latest[slot], config.backward_mode, sweep) {
                (Some(prev), BackwardMode::SingleSweep, s) if s > 0 => prev.conditioning != cond,
                _ => true,
            };
            if !fresh {
                continue;
            }
            let sel = run_test(c, target, cond, embedding, config, Pass::Backward, sweep)?;
            if sel.test.p_value > config.alpha_backward {
                survivors.retain(|&s| s != c);
                latest[slot] = None;
                removed = true;
            } else {
                latest[slot] = Some(sel);
            }
        }
        sweep += 1;

        let stale = selected.iter().enumerate().any(|(slot, &c)| {
            latest[slot]
                .as_ref()
                .is_some_and(|s| s.conditioning != others(&survivors, c))
        });
        let done = match config.backward_mode {
            BackwardMode::SingleSweep => !stale,
            BackwardMode::Fixpoint => !removed,
        };
        if done {
            break;
        }
    }

    Ok(latest.into_iter().flatten().collect())
}

/// Forward then backward pass for one target.
pub fn parents_of(
    target: usize,
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
) -> Result<Vec<Selection>, DiscoveryError> {
    let forward = forward_pass(target, embedding, config)?;
    let chosen: Vec<Candidate> = forward.iter().map(|s| s.candidate).collect();
    backward_pass(target, &chosen, embedding, config)
}
