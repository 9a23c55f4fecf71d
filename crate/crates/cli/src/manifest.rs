use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use outlierfreq_core::{run_sweep, EstimateRow, ExperimentConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const TOOL: &str = "outlierfreq";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to recompute a sweep: configs, seed and tool version,
/// together with the rows they produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub base_seed: u64,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub configs: Vec<ExperimentConfig>,
    pub rows: Vec<EstimateRow>,
}

impl RunManifest {
    pub fn new(configs: Vec<ExperimentConfig>, rows: Vec<EstimateRow>) -> Self {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            base_seed: configs.first().map_or(0, |c| c.base_seed),
            created,
            configs,
            rows,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: invalid manifest: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Re-runs every config and returns the fresh rows.
    pub fn replay(&self) -> Result<Vec<EstimateRow>> {
        let mut rows = Vec::new();
        for config in &self.configs {
            rows.extend(run_sweep(config)?);
        }
        Ok(rows)
    }

    /// Errors unless replaying reproduces the stored rows exactly.
    pub fn verify(&self) -> Result<usize> {
        if self.version != VERSION {
            eprintln!(
                "warning: manifest written by version {}, replaying with {VERSION}",
                self.version
            );
        }
        let fresh = self.replay()?;
        if fresh.len() != self.rows.len() {
            return Err(CliError::ReplayMismatch(format!(
                "expected {} rows, replay produced {}",
                self.rows.len(),
                fresh.len()
            )));
        }
        for (i, (a, b)) in self.rows.iter().zip(&fresh).enumerate() {
            if a != b {
                return Err(CliError::ReplayMismatch(format!(
                    "row {i} (n = {}): stored p_hat {} vs replayed {}",
                    a.n, a.p_hat, b.p_hat
                )));
            }
        }
        Ok(fresh.len())
    }
}
