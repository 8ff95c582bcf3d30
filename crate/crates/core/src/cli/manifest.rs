//! Run manifest: everything needed to replay a discovery.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::discovery::DiscoveryConfig;
use crate::graph::EvalReport;
use crate::numfmt::g17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub graph: PathBuf,
    pub table: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub input: PathBuf,
    pub config: DiscoveryConfig,
    pub outputs: Outputs,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub duration_seconds: f64,
    #[serde(default)]
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(input: PathBuf, config: DiscoveryConfig, outputs: Outputs, threads: Option<usize>, secs: f64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            input,
            config,
            outputs,
            threads,
            duration_seconds: secs,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("manifest serializes");
        v.push(b'\n');
        v
    }
}

/// One-line JSON summary of an evaluation.
pub fn report_json(r: &EvalReport) -> String {
    format!(
        "{{\"true_positives\": {}, \"false_positives\": {}, \"false_negatives\": {}, \"precision\": {}, \"recall\": {}, \"f1\": {}}}",
        r.true_positives,
        r.false_positives,
        r.false_negatives,
        g17(r.precision),
        g17(r.recall),
        g17(r.f1)
    )
}
