//! Experiment configuration.
//!
//! Config files are TOML documents restricted to `key = value` pairs, where a
//! value is an integer, float, string, boolean or a bracketed list of those.
//! The per-criterion settings of `verify` sit under `[section]` headers and
//! are addressed as dotted keys (`terminal.replicas`). Every key can be overridden with `--set key=value`, where the
//! value uses the same syntax; a bare word is taken as a string.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::kinetics::{Flavor, DEFAULT_BUDGET};

pub const TAU_TOML: &str = include_str!("../../configs/tau.toml");
pub const DROPLET_TOML: &str = include_str!("../../configs/droplet.toml");
pub const BOOTSTRAP_TOML: &str = include_str!("../../configs/bootstrap.toml");
pub const COUPLE_TOML: &str = include_str!("../../configs/couple.toml");
pub const GENEROUS_TOML: &str = include_str!("../../configs/generous.toml");
pub const VERIFY_TOML: &str = include_str!("../../configs/verify.toml");

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_true() -> bool {
    true
}

/// Settings for the sweep commands. Which axes are used depends on the
/// command: `tau` sweeps `n × k`, `droplet` sweeps `n × k` and reports every
/// `m`, `couple` sweeps `n × k × m`, `generous` sweeps `n × k × t` and
/// `bootstrap` sweeps `sizes` and `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Checked against the command's flavor when given.
    #[serde(default)]
    pub flavor: Option<Flavor>,
    #[serde(default)]
    pub n: Vec<f64>,
    #[serde(default)]
    pub k: Vec<f64>,
    #[serde(default)]
    pub m: Vec<u64>,
    #[serde(default)]
    pub t: Vec<f64>,
    /// Half-width of the simulation box `S(h)`. Commands with a natural
    /// default (`generous`: `round(8t)`) use it when absent.
    #[serde(default)]
    pub box_halfwidth: Option<u64>,
    pub replicas: usize,
    pub base_seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// `droplet`: also record the fully-infected-rectangle time.
    #[serde(default = "default_true")]
    pub track_rect: bool,
    /// `bootstrap`: box half-widths for the critical-density estimate.
    #[serde(default)]
    pub sizes: Vec<u64>,
    /// `bootstrap`: fills per bisection step of the critical-density estimate.
    #[serde(default)]
    pub pc_replicas: usize,
    /// `bootstrap`: densities of the coarse-grained experiment.
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub coarse_big: u64,
    #[serde(default)]
    pub coarse_small: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.replicas == 0 {
            return Err(HarnessError::Config("replicas must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(HarnessError::Config("budget must be positive".into()));
        }
        Ok(())
    }

    /// Fails if a flavor is set and differs from `expected`.
    pub fn require_flavor(&self, expected: Flavor) -> Result<(), HarnessError> {
        match self.flavor {
            Some(f) if f != expected => Err(HarnessError::Config(format!(
                "this command runs flavor {}, config asks for {}",
                expected.as_str(),
                f.as_str()
            ))),
            _ => Ok(()),
        }
    }

    /// Fails unless every named axis is nonempty.
    pub fn require_axes(&self, names: &[&str]) -> Result<(), HarnessError> {
        for name in names {
            let empty = match *name {
                "n" => self.n.is_empty(),
                "k" => self.k.is_empty(),
                "m" => self.m.is_empty(),
                "t" => self.t.is_empty(),
                "sizes" => self.sizes.is_empty(),
                "p" => self.p.is_empty(),
                other => return Err(HarnessError::Config(format!("unknown axis {other}"))),
            };
            if empty {
                return Err(HarnessError::Config(format!("sweep axis `{name}` is empty")));
            }
        }
        Ok(())
    }
}

/// Parse `text`, apply `key=value` overrides, and deserialize.
pub fn load_str<T: DeserializeOwned>(text: &str, overrides: &[String]) -> Result<T, HarnessError> {
    let mut table: toml::Table = text.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))
}

pub fn load_file<T: DeserializeOwned>(path: &Path, overrides: &[String]) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    load_str(&text, overrides)
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Apply one `--set a.b=value` override.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), HarnessError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override `{assignment}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(HarnessError::Config(format!("bad key in override `{assignment}`")));
    }
    let mut cur = table;
    for part in &path[..path.len() - 1] {
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| HarnessError::Config(format!("`{part}` in `{key}` is not a table")))?;
    }
    cur.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// SHA-256 of the canonical JSON form of a resolved config.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("configs serialize");
    let digest = Sha256::digest(&json);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
