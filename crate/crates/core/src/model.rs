//! Problem instances and the series derived from them.
//!
//! Time is split into uniform slots. A [`PowerSeries`] holds one power level
//! (kW) per slot together with the slot length in hours, so every integral over
//! the horizon becomes a sum weighted by `slot_duration`. Single-slot scenarios
//! model the static mechanisms (cases 1 to 3).
//!
//! Valuations, payments and utilities share one currency unit, the value of
//! one kWh.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::mechanisms::MechanismKind;

/// Power levels (kW), one per time slot of `slot_duration` hours.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub values: Vec<f64>,
    pub slot_duration: f64,
}

impl PowerSeries {
    pub fn new(values: Vec<f64>, slot_duration: f64) -> Self {
        Self { values, slot_duration }
    }

    /// One-hour slots.
    pub fn hourly(values: Vec<f64>) -> Self {
        Self::new(values, 1.0)
    }

    pub fn zeros(len: usize, slot_duration: f64) -> Self {
        Self::new(vec![0.0; len], slot_duration)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplies every value by `factor`, keeping the slot length.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.slot_duration)
    }
}

/// Energy (kWh) of a power series: the sum of value times slot length.
pub fn energy_of(p: &PowerSeries) -> f64 {
    p.values.iter().fold(0.0, |acc, v| acc + v * p.slot_duration)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub id: String,
    /// Desired consumption per slot.
    pub demand: PowerSeries,
}

impl UserProfile {
    pub fn new(id: impl Into<String>, demand: PowerSeries) -> Self {
        Self { id: id.into(), demand }
    }
}

/// Parameters of the congestion-penalty payment (case 6).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    /// Fraction of production considered safe, in `(0, 1]`.
    pub c: f64,
    /// Penalty charged per kW of aggregate grant above the safe band.
    pub k: f64,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self { c: 0.9, k: 1.0 }
    }
}

/// A full problem instance. User order is player order; every tie-break in
/// the crate refers to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub users: Vec<UserProfile>,
    pub production: PowerSeries,
    pub mechanism: MechanismKind,
    pub params: PenaltyParams,
}

impl Scenario {
    pub fn new(users: Vec<UserProfile>, production: PowerSeries, mechanism: MechanismKind) -> Self {
        Self {
            users,
            production,
            mechanism,
            params: PenaltyParams::default(),
        }
    }

    /// Single-slot scenario with one-hour slot and users named `u1..un`.
    pub fn single_slot(demands: &[f64], production: f64, mechanism: MechanismKind) -> Self {
        Self::from_series(
            &demands.iter().map(|&d| vec![d]).collect::<Vec<_>>(),
            vec![production],
            1.0,
            mechanism,
        )
    }

    /// Multi-slot scenario with users named `u1..un`.
    pub fn from_series(
        demands: &[Vec<f64>],
        production: Vec<f64>,
        slot_duration: f64,
        mechanism: MechanismKind,
    ) -> Self {
        let users = demands
            .iter()
            .enumerate()
            .map(|(i, d)| UserProfile::new(format!("u{}", i + 1), PowerSeries::new(d.clone(), slot_duration)))
            .collect();
        Self::new(users, PowerSeries::new(production, slot_duration), mechanism)
    }

    pub fn with_params(mut self, params: PenaltyParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_mechanism(mut self, mechanism: MechanismKind) -> Self {
        self.mechanism = mechanism;
        self
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_slots(&self) -> usize {
        self.production.len()
    }

    pub fn slot_duration(&self) -> f64 {
        self.production.slot_duration
    }

    pub fn demand(&self, user: usize, slot: usize) -> f64 {
        self.users[user].demand.values[slot]
    }

    /// The same scenario with user `i` removed. Remaining users keep their
    /// relative order.
    pub fn without_user(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.users.remove(i);
        s
    }

    /// The same scenario with user `i`'s demand replaced.
    pub fn with_demand(&self, i: usize, demand: PowerSeries) -> Self {
        let mut s = self.clone();
        s.users[i].demand = demand;
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    EmptySeries,
    NonFinitePower,
    NegativePower,
    NonPositiveSlotDuration,
    SlotDurationMismatch,
    SeriesLengthMismatch,
    DuplicateUserId,
    InvalidSafetyFraction,
    InvalidPenaltySlope,
    MechanismSlotCount,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptySeries => "EmptySeries",
            ViolationCode::NonFinitePower => "NonFinitePower",
            ViolationCode::NegativePower => "NegativePower",
            ViolationCode::NonPositiveSlotDuration => "NonPositiveSlotDuration",
            ViolationCode::SlotDurationMismatch => "SlotDurationMismatch",
            ViolationCode::SeriesLengthMismatch => "SeriesLengthMismatch",
            ViolationCode::DuplicateUserId => "DuplicateUserId",
            ViolationCode::InvalidSafetyFraction => "InvalidSafetyFraction",
            ViolationCode::InvalidPenaltySlope => "InvalidPenaltySlope",
            ViolationCode::MechanismSlotCount => "MechanismSlotCount",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

fn check_series(label: &str, p: &PowerSeries, out: &mut Vec<Violation>) {
    if p.is_empty() {
        out.push(Violation {
            code: ViolationCode::EmptySeries,
            message: format!("{label} has no slots"),
        });
    }
    if !(p.slot_duration > 0.0 && p.slot_duration.is_finite()) {
        out.push(Violation {
            code: ViolationCode::NonPositiveSlotDuration,
            message: format!("{label} slot duration {} is not positive", p.slot_duration),
        });
    }
    for (t, &v) in p.values.iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation {
                code: ViolationCode::NonFinitePower,
                message: format!("{label}[{t}] = {v} is not finite"),
            });
        } else if v < 0.0 {
            out.push(Violation {
                code: ViolationCode::NegativePower,
                message: format!("{label}[{t}] = {v} is negative"),
            });
        }
    }
}

/// Returns every invariant violation of `s`; empty iff the scenario is valid
/// for its mechanism.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    check_series("production", &s.production, &mut out);

    let mut seen = BTreeSet::new();
    for u in &s.users {
        let label = format!("demand of '{}'", u.id);
        check_series(&label, &u.demand, &mut out);
        if u.demand.len() != s.production.len() {
            out.push(Violation {
                code: ViolationCode::SeriesLengthMismatch,
                message: format!(
                    "{label} has {} slots, production has {}",
                    u.demand.len(),
                    s.production.len()
                ),
            });
        }
        if u.demand.slot_duration != s.production.slot_duration {
            out.push(Violation {
                code: ViolationCode::SlotDurationMismatch,
                message: format!(
                    "{label} uses {} h slots, production uses {} h",
                    u.demand.slot_duration, s.production.slot_duration
                ),
            });
        }
        if !seen.insert(u.id.as_str()) {
            out.push(Violation {
                code: ViolationCode::DuplicateUserId,
                message: format!("user id '{}' appears more than once", u.id),
            });
        }
    }

    let PenaltyParams { c, k } = s.params;
    if !(c > 0.0 && c <= 1.0) {
        out.push(Violation {
            code: ViolationCode::InvalidSafetyFraction,
            message: format!("safety fraction c = {c} is outside (0, 1]"),
        });
    }
    if !(k >= 0.0 && k.is_finite()) {
        out.push(Violation {
            code: ViolationCode::InvalidPenaltySlope,
            message: format!("penalty slope k = {k} must be finite and >= 0"),
        });
    }

    if s.mechanism.single_slot_only() && s.production.len() != 1 {
        out.push(Violation {
            code: ViolationCode::MechanismSlotCount,
            message: format!(
                "{} needs a single-slot scenario, got {} slots",
                s.mechanism,
                s.production.len()
            ),
        });
    }
    out
}

/// Per-slot sum of all user demands.
pub fn aggregate_demand(s: &Scenario) -> PowerSeries {
    let mut agg = PowerSeries::zeros(s.n_slots(), s.slot_duration());
    for u in &s.users {
        for (acc, v) in agg.values.iter_mut().zip(&u.demand.values) {
            *acc += v;
        }
    }
    agg
}

/// Production minus aggregate demand per slot (kW); negative in constrained slots.
pub fn headroom(s: &Scenario) -> Vec<f64> {
    let agg = aggregate_demand(s);
    s.production
        .values
        .iter()
        .zip(&agg.values)
        .map(|(p, d)| p - d)
        .collect()
}
