//! JSON report assembly. Reports are deterministic for a fixed
//! configuration except for the timestamp, which serde_json pretty
//! printing keeps on its own line so consumers can strip it.

use crate::config::RunConfig;
use crate::lck::verify::{CheckResult, Verification};
use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Seconds since the Unix epoch at assembly time.
    pub timestamp: u64,
    pub config: RunConfig,
    pub n_constant: Option<u64>,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(config: RunConfig, verification: &Verification) -> Report {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            schema_version: SCHEMA_VERSION,
            timestamp,
            config,
            n_constant: verification.n_constant,
            passed: verification.passed,
            checks: verification.checks.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
