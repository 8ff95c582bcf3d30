//! Permutation significance test for a single candidate link.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::embedding::{Candidate, LagEmbedding};
use super::DiscoveryConfig;
use crate::information::{conditional_mutual_information, InformationError, SampleBlock};
use crate::par;

/// Which phase requested a test. Part of the RNG substream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pass {
    Forward,
    Backward,
    /// Reserved for callers that run their own search over parent sets.
    External,
}

impl Pass {
    fn tag(self) -> u64 {
        match self {
            Pass::Forward => 1,
            Pass::Backward => 2,
            Pass::External => 3,
        }
    }
}

/// Identifies one shuffle test. Together with the run seed it fixes every
/// permutation the test draws, independent of thread scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TestKey {
    pub target: usize,
    pub candidate: Candidate,
    pub pass: Pass,
    pub iteration: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShuffleTestResult {
    pub observed_cmi: f64,
    pub p_value: f64,
    pub null_samples: Vec<f64>,
}

/// Add-one smoothed permutation p-value `(1 + #{null >= observed}) / (1 + B)`.
pub fn permutation_p_value(observed: f64, null: &[f64]) -> f64 {
    let exceed = null.iter().filter(|&&v| v >= observed).count();
    (1 + exceed) as f64 / (1 + null.len()) as f64
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic RNG for permutation `index` of the test `key`.
pub fn substream(seed: u64, key: &TestKey, index: u64) -> ChaCha8Rng {
    let words = [
        key.target as u64,
        key.candidate.variable as u64,
        key.candidate.lag as u64,
        key.pass.tag(),
        key.iteration,
        index,
    ];
    let mixed = words
        .iter()
        .fold(splitmix64(seed), |h, &w| splitmix64(h ^ splitmix64(w)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// CMI between `candidate` and the future of `target`, conditioned on the
/// columns of `conditioning`.
pub fn candidate_cmi(
    candidate_column: &[f64],
    target: usize,
    conditioning: &[Candidate],
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
) -> Result<f64, InformationError> {
    let x = SampleBlock::single(candidate_column);
    let y = SampleBlock::single(embedding.target_column(target));
    let z = conditioning_block(conditioning, embedding)?;
    conditional_mutual_information(&x, &y, &z, &config.estimator)
}

pub(crate) fn conditioning_block<'a>(
    conditioning: &[Candidate],
    embedding: &'a LagEmbedding,
) -> Result<SampleBlock<'a>, InformationError> {
    if conditioning.is_empty() {
        Ok(SampleBlock::empty(embedding.t_eff()))
    } else {
        SampleBlock::new(
            conditioning
                .iter()
                .map(|&c| embedding.candidate_column(c))
                .collect(),
        )
    }
}

/// Shuffle test of `candidate -> target | conditioning`.
///
/// Each null sample permutes the rows of the candidate column only; target
/// and conditioning rows stay in place. Permutation `b` is drawn from
/// [`substream`]`(config.seed, key, b)`.
pub fn shuffle_test(
    candidate: Candidate,
    target: usize,
    conditioning: &[Candidate],
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
    key: &TestKey,
) -> Result<ShuffleTestResult, InformationError> {
    debug_assert!(!conditioning.contains(&candidate));
    let column = embedding.candidate_column(candidate);
    let observed = candidate_cmi(column, target, conditioning, embedding, config)?;

    let null: Vec<Result<f64, InformationError>> =
        par::map_indexed(config.permutations, |b| {
            let mut rng = substream(config.seed, key, b as u64);
            let mut shuffled = column.to_vec();
            shuffled.shuffle(&mut rng);
            candidate_cmi(&shuffled, target, conditioning, embedding, config)
        });
    let null_samples = null.into_iter().collect::<Result<Vec<f64>, _>>()?;
    Ok(ShuffleTestResult {
        p_value: permutation_p_value(observed, &null_samples),
        observed_cmi: observed,
        null_samples,
    })
}

/// Selection-aware variant of [`shuffle_test`] for a greedy step: the
/// observed statistic is the largest CMI over `candidates`, and each null
/// sample applies one row permutation to every candidate column and keeps
/// the largest resulting CMI. Target and conditioning rows stay in place.
pub fn max_statistic_test(
    candidates: &[Candidate],
    target: usize,
    conditioning: &[Candidate],
    embedding: &LagEmbedding,
    config: &DiscoveryConfig,
    key: &TestKey,
) -> Result<ShuffleTestResult, InformationError> {
    let max_cmi = |columns: &mut dyn Iterator<Item = Vec<f64>>| -> Result<f64, InformationError> {
        let mut best = f64::NEG_INFINITY;
        for col in columns {
            best = best.max(candidate_cmi(&col, target, conditioning, embedding, config)?);
        }
        Ok(best)
    };
    let observed = max_cmi(&mut candidates.iter().map(|&c| embedding.candidate_column(c).to_vec()))?;

    let t = embedding.t_eff();
    let null: Vec<Result<f64, InformationError>> =
        par::map_indexed(config.permutations, |b| {
            let mut rng = substream(config.seed, key, b as u64);
            let mut order: Vec<usize> = (0..t).collect();
            order.shuffle(&mut rng);
            max_cmi(&mut candidates.iter().map(|&c| {
                let col = embedding.candidate_column(c);
                order.iter().map(|&r| col[r]).collect()
            }))
        });
    let null_samples = null.into_iter().collect::<Result<Vec<f64>, _>>()?;
    Ok(ShuffleTestResult {
        p_value: permutation_p_value(observed, &null_samples),
        observed_cmi: observed,
        null_samples,
    })
}
