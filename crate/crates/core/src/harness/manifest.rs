use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// The event budget ran out; the run's values are censored.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    /// Index of the sweep point.
    pub point: usize,
    pub replica: usize,
    pub seed: u64,
    pub outcome: RunStatus,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub base_seed: u64,
    pub runs: Vec<RunRecord>,
}

impl RunManifest {
    /// Fails if two runs share a derived seed. Checked over every pair.
    pub fn check_seeds(&self) -> Result<(), HarnessError> {
        let mut seen: HashMap<u64, u64> = HashMap::with_capacity(self.runs.len());
        for r in &self.runs {
            if let Some(other) = seen.insert(r.seed, r.run_id) {
                return Err(HarnessError::Config(format!(
                    "runs {other} and {} share derived seed {}",
                    r.run_id, r.seed
                )));
            }
        }
        Ok(())
    }

    pub fn censored(&self) -> usize {
        self.runs.iter().filter(|r| r.outcome == RunStatus::Budget).count()
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(f, self).map_err(std::io::Error::from)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(f).map_err(std::io::Error::from)?)
    }
}
