//! Unilateral misreport sweeps: scale one user's declared demand and compare
//! the utility they experience against the truthful report.

use alloc::vec::Vec;
use core::fmt;

use crate::engine::{run_mechanism_with, EngineError, MechanismResult, Tolerance};
use crate::mechanisms::{case1_served, MechanismKind};
use crate::model::{energy_of, Scenario};

/// Multipliers applied to a user's true demand series.
#[derive(Debug, Clone, PartialEq)]
pub struct MisreportGrid {
    factors: Vec<f64>,
}

impl Default for MisreportGrid {
    fn default() -> Self {
        Self {
            factors: alloc::vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    NegativeFactor(f64),
    MissingTruth,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::NegativeFactor(v) => write!(f, "misreport factor {v} is negative or not finite"),
            GridError::MissingTruth => f.write_str("misreport grid must contain the truthful factor 1.0"),
        }
    }
}

impl core::error::Error for GridError {}

impl MisreportGrid {
    pub fn new(factors: Vec<f64>) -> Result<Self, GridError> {
        if let Some(&bad) = factors.iter().find(|f| !(**f >= 0.0 && f.is_finite())) {
            return Err(GridError::NegativeFactor(bad));
        }
        if !factors.contains(&1.0) {
            return Err(GridError::MissingTruth);
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }
}

/// How a user values the outcome they end up with after misreporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UtilityConvention {
    /// Granted power valued up to true demand per slot, excess worth nothing.
    /// In the all-or-nothing cases 1 and 2 a grant short of the true demand
    /// is worth nothing either.
    #[default]
    Experienced,
    /// The mechanism's own valuation evaluated at the true demand. Differs from
    /// `Experienced` only in case 1, where a served user values the outcome at
    /// minus their true energy and a denied user at zero while still paying.
    ModelValuation,
}

impl UtilityConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            UtilityConvention::Experienced => "experienced",
            UtilityConvention::ModelValuation => "model",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisreportOutcome {
    pub factor: f64,
    pub truthful_utility: f64,
    /// `None` when the mechanism has no outcome for the misreport (case 4).
    pub misreport_utility: Option<f64>,
}

impl MisreportOutcome {
    /// `u(truth) - u(lie)`; negative means the lie paid off.
    pub fn margin(&self) -> Option<f64> {
        self.misreport_utility.map(|u| self.truthful_utility - u)
    }
}

/// Utility of user `i` with true scenario `truth` under `result`, which may
/// come from a scenario where `i` declared something else.
pub fn experienced_utility(
    truth: &Scenario,
    declared: &Scenario,
    result: &MechanismResult,
    i: usize,
    convention: UtilityConvention,
) -> f64 {
    let value = match (convention, truth.mechanism) {
        (UtilityConvention::ModelValuation, MechanismKind::Case1) => {
            if case1_served(declared, &result.allocation) {
                -energy_of(&truth.users[i].demand)
            } else {
                0.0
            }
        }
        // all-or-nothing cases: a need met only in part is not met at all
        (UtilityConvention::Experienced, MechanismKind::Case1 | MechanismKind::Case2) => {
            let demand = &truth.users[i].demand;
            let met = result
                .allocation
                .user(i)
                .iter()
                .zip(&demand.values)
                .all(|(g, x)| g >= x);
            if met {
                energy_of(demand)
            } else {
                0.0
            }
        }
        _ => {
            let dt = truth.slot_duration();
            result
                .allocation
                .user(i)
                .iter()
                .zip(&truth.users[i].demand.values)
                .map(|(g, x)| g.min(*x) * dt)
                .sum()
        }
    };
    value - result.payments[i]
}

/// Runs the mechanism once per factor with user `i`'s demand scaled.
pub fn misreport_sweep(
    s: &Scenario,
    i: usize,
    grid: &MisreportGrid,
    convention: UtilityConvention,
    tol: Tolerance,
) -> Result<Vec<MisreportOutcome>, EngineError> {
    if i >= s.n_users() {
        return Err(EngineError::UserOutOfRange {
            index: i,
            n_users: s.n_users(),
        });
    }
    let truthful = run_mechanism_with(s, tol)?;
    let truthful_utility = experienced_utility(s, s, &truthful, i, convention);
    let mut out = Vec::with_capacity(grid.factors().len());
    for &factor in grid.factors() {
        let misreport_utility = if factor == 1.0 {
            Some(truthful_utility)
        } else {
            let declared = s.with_demand(i, s.users[i].demand.scaled(factor));
            match run_mechanism_with(&declared, tol) {
                Ok(r) => Some(experienced_utility(s, &declared, &r, i, convention)),
                Err(EngineError::Infeasible) => None,
                Err(e) => return Err(e),
            }
        };
        out.push(MisreportOutcome {
            factor,
            truthful_utility,
            misreport_utility,
        });
    }
    Ok(out)
}
