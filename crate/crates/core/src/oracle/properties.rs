//! Per-scenario property checks.
//!
//! Which properties are asserted depends on the mechanism:
//!
//! | property                | asserted for            | recorded only |
//! |-------------------------|-------------------------|---------------|
//! | capacity                | all                     |               |
//! | no positive transfer    | all                     |               |
//! | individual rationality  | 2, 3, 4                 | 1, 5, 6       |
//! | truthfulness            | 2, 3 (1 under model valuation) | 4, 5, 6 (1 otherwise) |
//! | utilization             | 3                       |               |
//! | proportionality         | 5                       |               |
//! | energy floor / ceiling  | 4 / 6                   |               |
//! | welfare vs. brute force | 1, 2, 3, 4, 5, 6 (within budget) |      |
//!
//! Every margin is oriented so that `>= 0` means the property holds.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::brute_force::{brute_force_outcome, OracleError, DEFAULT_BUDGET, DEFAULT_RESOLUTION};
use super::misreport::{misreport_sweep, MisreportGrid, UtilityConvention};
use crate::engine::{run_mechanism_with, EngineError, MechanismResult, Tolerance};
use crate::mechanisms::{penalty_excess, MechanismKind};
use crate::model::Scenario;

/// Threshold on `u(truth) - u(lie)`.
pub const TRUTH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Capacity,
    NoPositiveTransfer,
    IndividualRationality,
    Truthfulness,
    Utilization,
    Proportionality,
    EnergyFloor,
    EnergyCeiling,
    UniformPenalty,
    WelfareOracle,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Capacity => "capacity",
            Property::NoPositiveTransfer => "no_positive_transfer",
            Property::IndividualRationality => "individual_rationality",
            Property::Truthfulness => "truthfulness",
            Property::Utilization => "utilization",
            Property::Proportionality => "proportionality",
            Property::EnergyFloor => "energy_floor",
            Property::EnergyCeiling => "energy_ceiling",
            Property::UniformPenalty => "uniform_penalty",
            Property::WelfareOracle => "welfare_oracle",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    RecordedOnly,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::RecordedOnly => "recorded_only",
            Verdict::Skipped => "skipped",
        }
    }
}

/// Where the worst margin was observed. The scenario is the one the report
/// was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Witness {
    pub user: Option<usize>,
    pub slot: Option<usize>,
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginSummary {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Samples below the property's threshold.
    pub below: usize,
}

impl MarginSummary {
    fn from_samples(samples: &[f64], threshold: f64) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Some(Self {
            count: samples.len(),
            min,
            mean,
            max,
            below: samples.iter().filter(|&&m| m < threshold).count(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub property: Property,
    pub verdict: Verdict,
    pub asserted: bool,
    /// Smallest observed margin; `None` when there was nothing to measure.
    pub worst_margin: Option<f64>,
    pub witness: Option<Witness>,
    pub distribution: Option<MarginSummary>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub mechanism: MechanismKind,
    pub checks: Vec<PropertyCheck>,
    /// The mechanism had no outcome for this scenario.
    pub infeasible: bool,
}

impl PropertyReport {
    pub fn get(&self, p: Property) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == p)
    }

    pub fn violations(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Violated)
    }

    pub fn all_asserted_hold(&self) -> bool {
        self.violations().next().is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub grid: MisreportGrid,
    pub convention: UtilityConvention,
    pub resolution: f64,
    pub budget: u64,
    pub tolerance: Tolerance,
    /// Skip the misreport sweep entirely.
    pub skip_truthfulness: bool,
    /// Skip the brute-force welfare comparison.
    pub skip_oracle: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            grid: MisreportGrid::default(),
            convention: UtilityConvention::Experienced,
            resolution: DEFAULT_RESOLUTION,
            budget: DEFAULT_BUDGET,
            tolerance: Tolerance::default(),
            skip_truthfulness: false,
            skip_oracle: false,
        }
    }
}

/// Tracks the worst sample seen for one property.
struct Tracker {
    worst: Option<(f64, Witness)>,
    samples: Vec<f64>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            worst: None,
            samples: Vec::new(),
        }
    }

    fn observe(&mut self, margin: f64, witness: Witness) {
        self.samples.push(margin);
        if self.worst.is_none_or(|(m, _)| margin < m) {
            self.worst = Some((margin, witness));
        }
    }

    fn finish(self, property: Property, asserted: bool, threshold: f64, note: &str) -> PropertyCheck {
        let worst_margin = self.worst.map(|w| w.0);
        let verdict = match (asserted, worst_margin) {
            (false, _) => Verdict::RecordedOnly,
            (true, Some(m)) if m < threshold => Verdict::Violated,
            (true, _) => Verdict::Holds,
        };
        PropertyCheck {
            property,
            verdict,
            asserted,
            worst_margin,
            witness: self.worst.map(|w| w.1),
            distribution: MarginSummary::from_samples(&self.samples, threshold),
            note: String::from(note),
        }
    }
}

fn user(i: usize) -> Witness {
    Witness {
        user: Some(i),
        ..Witness::default()
    }
}

fn slot(t: usize) -> Witness {
    Witness {
        slot: Some(t),
        ..Witness::default()
    }
}

fn skipped(property: Property, asserted: bool, note: &str) -> PropertyCheck {
    PropertyCheck {
        property,
        verdict: Verdict::Skipped,
        asserted,
        worst_margin: None,
        witness: None,
        distribution: None,
        note: String::from(note),
    }
}

/// Runs the mechanism on `s` and evaluates every applicable property.
///
/// Returns an error only for invalid scenarios; an infeasible case 4
/// scenario yields a report with `infeasible` set and every check skipped.
pub fn check_properties(s: &Scenario, opts: &CheckOptions) -> Result<PropertyReport, EngineError> {
    let kind = s.mechanism;
    let result = match run_mechanism_with(s, opts.tolerance) {
        Ok(r) => r,
        Err(EngineError::Infeasible) => {
            return Ok(PropertyReport {
                mechanism: kind,
                checks: alloc::vec![skipped(Property::Capacity, true, "mechanism has no feasible outcome")],
                infeasible: true,
            })
        }
        Err(e) => return Err(e),
    };
    check_outcome(s, &result, opts)
}

/// As [`check_properties`], for a result already computed from `s`.
pub fn check_outcome(s: &Scenario, r: &MechanismResult, opts: &CheckOptions) -> Result<PropertyReport, EngineError> {
    let mut checks = check_result(s, r, opts);
    checks.push(truthfulness(s, opts)?);
    checks.push(welfare_oracle(s, r, opts));
    Ok(PropertyReport {
        mechanism: s.mechanism,
        checks,
        infeasible: false,
    })
}

/// Checks that only need the truthful result.
pub fn check_result(s: &Scenario, r: &MechanismResult, opts: &CheckOptions) -> Vec<PropertyCheck> {
    use MechanismKind::*;
    let kind = s.mechanism;
    let eps = opts.tolerance.eps;
    let n = s.n_users();
    let dt = s.slot_duration();
    let mut checks = Vec::new();

    let mut cap = Tracker::new();
    for t in 0..s.n_slots() {
        cap.observe(s.production.values[t] - r.allocation.column_sum(t), slot(t));
    }
    checks.push(cap.finish(Property::Capacity, true, -eps, ""));

    let mut npt = Tracker::new();
    let mut ir = Tracker::new();
    for i in 0..n {
        npt.observe(r.payments[i], user(i));
        ir.observe(r.utilities[i], user(i));
    }
    checks.push(npt.finish(Property::NoPositiveTransfer, true, -eps, ""));
    checks.push(ir.finish(
        Property::IndividualRationality,
        matches!(kind, Case2 | Case3 | Case4),
        -eps,
        match kind {
            Case1 => "pivotal users pay even when denied",
            Case5 => "rule is not welfare maximizing",
            Case6 => "congestion penalty can exceed value",
            _ => "",
        },
    ));

    if kind == Case3 && s.n_slots() == 1 {
        let demand: f64 = (0..n).map(|i| s.demand(i, 0)).sum();
        let target = demand.min(s.production.values[0]);
        let mut util = Tracker::new();
        util.observe(-(r.allocation.column_sum(0) - target).abs(), slot(0));
        checks.push(util.finish(Property::Utilization, true, -eps, ""));
    }

    if kind == Case5 {
        let mut prop = Tracker::new();
        for t in 0..s.n_slots() {
            let demand: f64 = (0..n).map(|i| s.demand(i, t)).sum();
            if demand <= s.production.values[t] {
                continue;
            }
            prop.observe(-(r.allocation.column_sum(t) - s.production.values[t]).abs(), slot(t));
            for i in 0..n {
                for j in 0..n {
                    if i != j && s.demand(j, t) > 0.0 {
                        let lhs = r.allocation.get(i, t) * s.demand(j, t);
                        let rhs = r.allocation.get(j, t) * s.demand(i, t);
                        prop.observe(
                            -(lhs - rhs).abs(),
                            Witness {
                                user: Some(i),
                                slot: Some(t),
                                factor: None,
                            },
                        );
                    }
                }
            }
        }
        checks.push(prop.finish(Property::Proportionality, true, -eps, "rationed slots only"));
    }

    if matches!(kind, Case4 | Case6) {
        let mut bound = Tracker::new();
        for i in 0..n {
            let demanded: f64 = s.users[i].demand.values.iter().map(|x| x * dt).sum();
            let granted = r.allocation.energy(i, dt);
            let margin = if kind == Case4 {
                granted - demanded
            } else {
                demanded - granted
            };
            bound.observe(margin, user(i));
        }
        let p = if kind == Case4 {
            Property::EnergyFloor
        } else {
            Property::EnergyCeiling
        };
        checks.push(bound.finish(p, true, -eps, ""));
    }

    if kind == Case6 {
        let mut uni = Tracker::new();
        for i in 0..n {
            let charge = r.payments[i] - r.allocation.energy(i, dt);
            let expected: f64 = (0..s.n_slots())
                .map(|t| s.params.k * penalty_excess(s, &r.allocation, t) * dt)
                .sum();
            uni.observe(-(charge - expected).abs(), user(i));
        }
        checks.push(uni.finish(Property::UniformPenalty, true, -eps, ""));
    }

    checks
}

fn truthfulness(s: &Scenario, opts: &CheckOptions) -> Result<PropertyCheck, EngineError> {
    use MechanismKind::*;
    let kind = s.mechanism;
    let asserted = match kind {
        Case2 | Case3 => true,
        Case1 => opts.convention == UtilityConvention::ModelValuation,
        _ => false,
    };
    if opts.skip_truthfulness {
        return Ok(skipped(Property::Truthfulness, asserted, "disabled"));
    }
    let mut tracker = Tracker::new();
    let mut skipped_runs = 0usize;
    for i in 0..s.n_users() {
        for o in misreport_sweep(s, i, &opts.grid, opts.convention, opts.tolerance)? {
            match o.margin() {
                Some(m) => tracker.observe(
                    m,
                    Witness {
                        user: Some(i),
                        slot: None,
                        factor: Some(o.factor),
                    },
                ),
                None => skipped_runs += 1,
            }
        }
    }
    let note = if skipped_runs > 0 {
        alloc::format!(
            "{} convention; {skipped_runs} infeasible misreports skipped",
            opts.convention.as_str()
        )
    } else {
        alloc::format!("{} convention", opts.convention.as_str())
    };
    Ok(tracker.finish(Property::Truthfulness, asserted, -TRUTH_TOL, &note))
}

fn welfare_oracle(s: &Scenario, r: &MechanismResult, opts: &CheckOptions) -> PropertyCheck {
    use MechanismKind::*;
    if opts.skip_oracle {
        return skipped(Property::WelfareOracle, true, "disabled");
    }
    let eps = opts.tolerance.eps;
    match brute_force_outcome(s, opts.resolution, opts.budget) {
        Ok(b) => {
            // Cases 3, 4 and 6 search a grid, so the engine may beat it by up to one step per cell.
            let allowance = match s.mechanism {
                Case3 | Case4 | Case6 => opts.resolution * (s.n_users() * s.n_slots()) as f64 * s.slot_duration(),
                _ => 0.0,
            };
            let diff = r.welfare - b.welfare;
            // engine below the oracle is always a failure; above it only beyond the grid allowance
            let margin = if diff < 0.0 { diff } else { allowance - diff };
            let mut t = Tracker::new();
            t.observe(margin, Witness::default());
            let note = alloc::format!(
                "engine {} vs brute force {} over {} points",
                r.welfare,
                b.welfare,
                b.points
            );
            t.finish(Property::WelfareOracle, true, -eps, &note)
        }
        Err(e @ OracleError::BudgetExceeded { .. }) => skipped(Property::WelfareOracle, true, &alloc::format!("{e}")),
        Err(e) => PropertyCheck {
            verdict: Verdict::Violated,
            ..skipped(Property::WelfareOracle, true, &alloc::format!("{e}"))
        },
    }
}
