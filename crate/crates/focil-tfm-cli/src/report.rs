//! Deterministic, diffable command reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One command's structured output. Every section except `timings` is a
/// pure function of the inputs, so two runs over the same files diff clean
/// after dropping that one key.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub command: String,
    /// Input names mapped to the sha-256 of their bytes.
    pub inputs: BTreeMap<String, String>,
    /// Per-input structured results, keyed like `inputs`.
    pub results: BTreeMap<String, serde_json::Value>,
    /// Wall-clock milliseconds, quarantined in their own section.
    pub timings: Timings,
}

/// Name and version of the binary that wrote the report.
#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

/// Wall-clock timings; never part of determinism comparisons.
#[derive(Debug, Default, Serialize)]
pub struct Timings {
    pub total_ms: u128,
    pub per_input_ms: BTreeMap<String, u128>,
}

impl RunReport {
    /// An empty report for the named subcommand.
    pub fn new(command: &str) -> RunReport {
        RunReport {
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            timings: Timings::default(),
        }
    }

    /// Canonical rendering: sorted map keys, fixed field order, exact
    /// rationals, one trailing newline.
    pub fn canonical(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        text
    }

    /// Records one input's digest and result under the same key.
    pub fn record(&mut self, name: &str, bytes: &[u8], result: serde_json::Value) {
        self.inputs.insert(name.to_string(), digest(bytes));
        self.results.insert(name.to_string(), result);
    }

    /// Stamps the total wall-clock time.
    pub fn finish(&mut self, started: Instant) {
        self.timings.total_ms = started.elapsed().as_millis();
    }
}

/// Lowercase hex sha-256 of the bytes.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}
