use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Attached to every command's output. Timestamps live only here so that
/// primary outputs stay byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub started_unix_s: f64,
    pub wall_time_s: f64,
}

impl Provenance {
    pub fn new(config: serde_json::Value) -> Self {
        let started = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or(Duration::ZERO)
            .as_secs_f64();
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config,
            inputs: BTreeMap::new(),
            started_unix_s: started,
            wall_time_s: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path, sha256: String) {
        self.inputs.insert(path.display().to_string(), sha256);
    }
}
