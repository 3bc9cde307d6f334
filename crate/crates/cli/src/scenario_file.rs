//! JSON scenario files.
//!
//! ```json
//! {
//!   "slot_duration_h": 1.0,
//!   "production": [4.0, 4.0],
//!   "users": [{ "id": "u1", "demand": [3.0, 0.0] }],
//!   "mechanism": "case4",
//!   "params": { "c": 0.9, "k": 1.0 }
//! }
//! ```
//!
//! `params` is optional. Numbers are written in shortest round-trip form, so
//! save followed by load reproduces the scenario bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use dsm_vcg_core::{validate_scenario, MechanismKind, PenaltyParams, PowerSeries, Scenario, UserProfile, Violation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub slot_duration_h: f64,
    pub production: Vec<f64>,
    pub users: Vec<UserEntry>,
    pub mechanism: String,
    #[serde(default)]
    pub params: ParamsEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub id: String,
    pub demand: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsEntry {
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_k")]
    pub k: f64,
}

fn default_c() -> f64 {
    PenaltyParams::default().c
}

fn default_k() -> f64 {
    PenaltyParams::default().k
}

impl Default for ParamsEntry {
    fn default() -> Self {
        let p = PenaltyParams::default();
        Self { c: p.c, k: p.k }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {}", format_violations(.0))]
    Validation(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            slot_duration_h: s.slot_duration(),
            production: s.production.values.clone(),
            users: s
                .users
                .iter()
                .map(|u| UserEntry {
                    id: u.id.clone(),
                    demand: u.demand.values.clone(),
                })
                .collect(),
            mechanism: s.mechanism.as_str().to_string(),
            params: ParamsEntry {
                c: s.params.c,
                k: s.params.k,
            },
        }
    }

    /// Builds the model without validating it.
    pub fn to_scenario(&self) -> Result<Scenario, LoadError> {
        let mechanism: MechanismKind = self.mechanism.parse().map_err(|e| LoadError::Parse(format!("{e}")))?;
        let dt = self.slot_duration_h;
        let users = self
            .users
            .iter()
            .map(|u| UserProfile::new(u.id.clone(), PowerSeries::new(u.demand.clone(), dt)))
            .collect();
        Ok(
            Scenario::new(users, PowerSeries::new(self.production.clone(), dt), mechanism).with_params(PenaltyParams {
                c: self.params.c,
                k: self.params.k,
            }),
        )
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, LoadError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
    let s = file.to_scenario()?;
    let violations = validate_scenario(&s);
    if !violations.is_empty() {
        return Err(LoadError::Validation(violations));
    }
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn scenario_to_json(s: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes");
    text.push('\n');
    text
}

/// Compact canonical form, used for digests.
pub fn canonical_json(s: &Scenario) -> String {
    serde_json::to_string(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}

pub fn save_scenario(s: &Scenario, path: &Path) -> std::io::Result<()> {
    write_atomic(path, scenario_to_json(s).as_bytes())
}

/// Writes via a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
