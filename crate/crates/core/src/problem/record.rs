use serde::{Deserialize, Serialize};

use crate::analysis::ConvergenceReport;

use super::{LevelSummary, ProblemSpec, VerificationReport};

/// Everything a CLI run produced, keyed by the configuration hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub config_hash: String,
    /// Supplied by the caller; the library never reads the clock.
    pub timestamp: String,
    pub config: ProblemSpec,
    pub levels: Vec<LevelSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ConvergenceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl RunRecord {
    pub fn new(spec: &ProblemSpec, timestamp: impl Into<String>) -> Self {
        RunRecord {
            problem: spec.name.clone(),
            config_hash: spec.config_hash(),
            timestamp: timestamp.into(),
            config: spec.clone(),
            levels: Vec::new(),
            report: None,
            verification: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record is serialisable")
    }
}
