//! JSON run reports.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// What one CLI invocation did. Identical invocations give identical reports
/// apart from `wall_time_ms`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub params: Value,
    pub result: Value,
    pub decision: Option<String>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new<P: Serialize, R: Serialize>(command: &str, seed: Option<u64>, params: &P, result: &R) -> Result<Self> {
        Ok(RunReport {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params: serde_json::to_value(params).map_err(|e| Error::Format(e.to_string()))?,
            result: serde_json::to_value(result).map_err(|e| Error::Format(e.to_string()))?,
            decision: None,
            wall_time_ms: 0,
        })
    }

    pub fn with_decision(mut self, decision: impl Serialize) -> Self {
        self.decision = match serde_json::to_value(decision) {
            Ok(Value::String(s)) => Some(s),
            Ok(other) => Some(other.to_string()),
            Err(_) => None,
        };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
