//! Result reports: a JSON document plus a flat CSV of per-slot trends.

use std::path::Path;

use dsm_vcg_core::oracle::{MarginSummary, PropertyCheck, PropertyReport, Verdict};
use dsm_vcg_core::{aggregate_demand, MechanismResult, Scenario};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scenario_file::{canonical_json, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    /// `sha256:<hex>` of the scenario's compact canonical JSON.
    pub scenario_digest: String,
    pub mechanism: String,
    pub slot_duration_h: f64,
    pub users: Vec<UserRow>,
    pub welfare: f64,
    pub trends: Vec<TrendRow>,
    pub properties: Option<PropertySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRow {
    pub id: String,
    pub grant: Vec<f64>,
    pub valuation: f64,
    pub payment: f64,
    pub utility: f64,
    pub pivotal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub t: usize,
    pub production: f64,
    pub agg_demand: f64,
    pub agg_grant: f64,
    pub headroom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySummary {
    pub infeasible: bool,
    pub all_asserted_hold: bool,
    pub checks: Vec<CheckRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub property: String,
    pub verdict: String,
    pub asserted: bool,
    pub worst_margin: Option<f64>,
    pub witness_user: Option<usize>,
    pub witness_slot: Option<usize>,
    pub witness_factor: Option<f64>,
    pub distribution: Option<Distribution>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub below: usize,
}

impl From<&MarginSummary> for Distribution {
    fn from(m: &MarginSummary) -> Self {
        Self {
            count: m.count,
            min: m.min,
            mean: m.mean,
            max: m.max,
            below: m.below,
        }
    }
}

impl From<&PropertyCheck> for CheckRow {
    fn from(c: &PropertyCheck) -> Self {
        Self {
            property: c.property.as_str().to_string(),
            verdict: c.verdict.as_str().to_string(),
            asserted: c.asserted,
            worst_margin: c.worst_margin,
            witness_user: c.witness.and_then(|w| w.user),
            witness_slot: c.witness.and_then(|w| w.slot),
            witness_factor: c.witness.and_then(|w| w.factor),
            distribution: c.distribution.as_ref().map(Distribution::from),
            note: c.note.clone(),
        }
    }
}

impl From<&PropertyReport> for PropertySummary {
    fn from(r: &PropertyReport) -> Self {
        Self {
            infeasible: r.infeasible,
            all_asserted_hold: r.all_asserted_hold(),
            checks: r.checks.iter().map(CheckRow::from).collect(),
        }
    }
}

impl PropertySummary {
    pub fn violations(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Violated.as_str())
    }
}

pub fn scenario_digest(s: &Scenario) -> String {
    let hash = Sha256::digest(canonical_json(s).as_bytes());
    format!("sha256:{}", hex::encode(hash))
}

pub fn build_report(s: &Scenario, r: &MechanismResult, props: Option<&PropertyReport>) -> ReportDocument {
    let users = s
        .users
        .iter()
        .enumerate()
        .map(|(i, u)| UserRow {
            id: u.id.clone(),
            grant: r.allocation.user(i).to_vec(),
            valuation: r.valuations[i],
            payment: r.payments[i],
            utility: r.utilities[i],
            pivotal: r.pivotal[i],
        })
        .collect();
    let demand = aggregate_demand(s);
    let trends = (0..s.n_slots())
        .map(|t| {
            let production = s.production.values[t];
            TrendRow {
                t,
                production,
                agg_demand: demand.values[t],
                agg_grant: r.allocation.column_sum(t),
                headroom: production - demand.values[t],
            }
        })
        .collect();
    ReportDocument {
        scenario_digest: scenario_digest(s),
        mechanism: s.mechanism.as_str().to_string(),
        slot_duration_h: s.slot_duration(),
        users,
        welfare: r.welfare,
        trends,
        properties: props.map(PropertySummary::from),
    }
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Header `t,production,agg_demand,agg_grant,headroom,grant_<id>...`, one row per slot.
    pub fn trends_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["t", "production", "agg_demand", "agg_grant", "headroom"]
            .iter()
            .map(|h| h.to_string())
            .collect();
        header.extend(self.users.iter().map(|u| format!("grant_{}", u.id)));
        w.write_record(&header).expect("in-memory write");
        for row in &self.trends {
            let mut rec = vec![
                row.t.to_string(),
                num(row.production),
                num(row.agg_demand),
                num(row.agg_grant),
                num(row.headroom),
            ];
            rec.extend(self.users.iter().map(|u| num(u.grant[row.t])));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

/// Shortest string that parses back to the same double.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Writes the JSON report and, when `csv_path` is given, the trend CSV.
pub fn write_report(doc: &ReportDocument, json_path: &Path, csv_path: Option<&Path>) -> std::io::Result<()> {
    write_atomic(json_path, doc.to_json().as_bytes())?;
    if let Some(p) = csv_path {
        write_atomic(p, doc.trends_csv().as_bytes())?;
    }
    Ok(())
}
