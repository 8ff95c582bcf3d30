//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as a plain message.
//! The `*_json` functions carry the logic and are usable natively.

use centropy::datasets::{linear_stochastic_gaussian_process, SyntheticConfig};
use centropy::discovery::{
    build_lag_embedding, discover_network, shuffle_test, Candidate, DiscoveryConfig, Pass, TestKey,
};
use centropy::graph::{evaluate, serialize, CausalGraph, Format};
use centropy::information::{mutual_information, EstimatorKind, EstimatorSpec, SampleBlock};
use centropy::TimeSeries;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub const MAX_NODES: usize = 12;
pub const MAX_LENGTH: usize = 5000;
pub const CURVE_POINTS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

fn spec(name: &str) -> Result<EstimatorSpec, String> {
    let kind: EstimatorKind = name.parse().map_err(|e: centropy::information::InformationError| e.to_string())?;
    Ok(EstimatorSpec::new(kind))
}

fn edges(g: &CausalGraph) -> Value {
    json!(g.edges())
}

/// Synthesizes a linear Gaussian network, recovers it and scores the result.
pub fn discover_json(n: usize, t: usize, p: f64, seed: u64, estimator: &str, permutations: usize) -> Result<String, String> {
    if n > MAX_NODES || t > MAX_LENGTH {
        return Err(format!("demo limits: n <= {MAX_NODES}, T <= {MAX_LENGTH}"));
    }
    let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(n, t, 0.7, p, seed)).map_err(|e| e.to_string())?;
    let cfg = DiscoveryConfig {
        permutations,
        ..DiscoveryConfig::default()
    }
    .with_seed(seed)
    .with_estimator(spec(estimator)?);
    let found = discover_network(&inst.data, &cfg).map_err(|e| e.to_string())?;
    let report = evaluate(&found, &inst.truth, false).map_err(|e| e.to_string())?;
    Ok(json!({
        "names": found.node_names(),
        "truth": edges(&inst.truth),
        "found": edges(&found),
        "report": report,
        "dot": String::from_utf8_lossy(&serialize(&found, Format::Dot)),
    })
    .to_string())
}

/// Estimated against closed-form MI of a bivariate Gaussian across correlations.
pub fn mi_curve_json(estimator: &str, samples: usize, seed: u64) -> Result<String, String> {
    if !(10..=MAX_LENGTH).contains(&samples) {
        return Err(format!("samples must lie in [10, {MAX_LENGTH}]"));
    }
    let spec = spec(estimator)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let base: Vec<(f64, f64)> = (0..samples).map(|_| (normal(), normal())).collect();
    let mut points = Vec::new();
    for r in CURVE_POINTS {
        let x: Vec<f64> = base.iter().map(|b| b.0).collect();
        let y: Vec<f64> = base.iter().map(|b| r * b.0 + (1.0 - r * r).sqrt() * b.1).collect();
        let est = mutual_information(&SampleBlock::single(&x), &SampleBlock::single(&y), &spec).map_err(|e| e.to_string())?;
        points.push(json!({"r": r, "truth": -0.5 * (1.0 - r * r).ln(), "estimate": est}));
    }
    Ok(json!({"estimator": spec.kind.name(), "points": points}).to_string())
}

/// Shuffle null of `I(X(t-1); Y(t))` for `Y(t) = c X(t-1) + noise`.
pub fn null_histogram_json(coupling: f64, t: usize, permutations: usize, seed: u64, bins: usize) -> Result<String, String> {
    if t > MAX_LENGTH || bins == 0 {
        return Err(format!("need T <= {MAX_LENGTH} and at least one bin"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let x: Vec<f64> = (0..t).map(|_| normal()).collect();
    let mut y = vec![normal()];
    for i in 1..t {
        y.push(coupling * x[i - 1] + normal());
    }
    let data = TimeSeries::from_columns(vec![x, y]).map_err(|e| e.to_string())?;
    let cfg = DiscoveryConfig {
        permutations,
        ..DiscoveryConfig::default()
    }
    .with_seed(seed);
    cfg.validate().map_err(|e| e.to_string())?;
    let emb = build_lag_embedding(&data, 1).map_err(|e| e.to_string())?.standardized();
    let cand = Candidate::new(0, 1);
    let key = TestKey {
        target: 1,
        candidate: cand,
        pass: Pass::External,
        iteration: 0,
    };
    let res = shuffle_test(cand, 1, &[], &emb, &cfg, &key).map_err(|e| e.to_string())?;
    let hi = res.null_samples.iter().copied().fold(res.observed_cmi, f64::max);
    let lo = res.null_samples.iter().copied().fold(res.observed_cmi, f64::min);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in &res.null_samples {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    Ok(json!({
        "observed": res.observed_cmi,
        "p_value": res.p_value,
        "lo": lo,
        "width": width,
        "counts": counts,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn discover(n: usize, t: usize, p: f64, seed: u32, estimator: &str, permutations: usize) -> Result<String, String> {
    discover_json(n, t, p, seed as u64, estimator, permutations)
}

#[wasm_bindgen]
pub fn mi_curve(estimator: &str, samples: usize, seed: u32) -> Result<String, String> {
    mi_curve_json(estimator, samples, seed as u64)
}

#[wasm_bindgen]
pub fn null_histogram(coupling: f64, t: usize, permutations: usize, seed: u32, bins: usize) -> Result<String, String> {
    null_histogram_json(coupling, t, permutations, seed as u64, bins)
}
