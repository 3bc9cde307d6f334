//! Welfare maximization and VCG payments over a pluggable outcome solver.
//!
//! A mechanism is a social choice function plus one payment per user. The
//! engine asks an [`OutcomeSolver`] for the welfare-optimal allocation of the
//! full scenario and, for Clarke pivot payments, of every scenario with one
//! user removed. Each user pays the welfare the others would reach without
//! them minus the welfare the others actually get.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::mechanisms::{self, MechanismKind};
use crate::model::{validate_scenario, PowerSeries, Scenario, Violation};
use crate::solvers::LpError;

/// Absolute tolerance (kW or currency) for feasibility and sign checks.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS }
    }
}

/// Granted power (kW) per user (rows) and slot (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    grants: Vec<Vec<f64>>,
    n_slots: usize,
}

impl Allocation {
    pub fn zeros(n_users: usize, n_slots: usize) -> Self {
        Self {
            grants: vec![vec![0.0; n_slots]; n_users],
            n_slots,
        }
    }

    /// Builds an allocation from per-user rows. All rows must have `n_slots` entries.
    pub fn from_rows(grants: Vec<Vec<f64>>, n_slots: usize) -> Self {
        assert!(grants.iter().all(|r| r.len() == n_slots), "ragged allocation");
        Self { grants, n_slots }
    }

    pub fn n_users(&self) -> usize {
        self.grants.len()
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.grants
    }

    pub fn user(&self, i: usize) -> &[f64] {
        &self.grants[i]
    }

    pub fn get(&self, i: usize, t: usize) -> f64 {
        self.grants[i][t]
    }

    pub fn column_sum(&self, t: usize) -> f64 {
        // an empty f64 sum is -0.0
        self.grants.iter().fold(0.0, |acc, r| acc + r[t])
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.n_slots).map(|t| self.column_sum(t)).collect()
    }

    /// Granted energy (kWh) of user `i` for slots of `slot_duration` hours.
    pub fn energy(&self, i: usize, slot_duration: f64) -> f64 {
        self.grants[i].iter().map(|g| g * slot_duration).sum()
    }

    /// Largest amount by which any slot exceeds `production`; `<= 0` when feasible.
    pub fn capacity_excess(&self, production: &PowerSeries) -> f64 {
        (0..self.n_slots)
            .map(|t| self.column_sum(t) - production.values[t])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Entries non-negative and finite, column sums within `eps` of production.
    pub fn is_feasible(&self, production: &PowerSeries, eps: f64) -> bool {
        self.grants.iter().flatten().all(|g| g.is_finite() && *g >= 0.0)
            && (self.n_slots == 0 || self.capacity_excess(production) <= eps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    InvalidScenario(Vec<Violation>),
    /// The mechanism's outcome set is empty for this scenario.
    Infeasible,
    UserOutOfRange {
        index: usize,
        n_users: usize,
    },
    Solver(LpError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::InvalidScenario(v) => {
                write!(f, "invalid scenario ({} violations)", v.len())?;
                for violation in v {
                    write!(f, "; {violation}")?;
                }
                Ok(())
            }
            EngineError::Infeasible => f.write_str("no allocation satisfies the mechanism's constraints"),
            EngineError::UserOutOfRange { index, n_users } => {
                write!(f, "user index {index} out of range for {n_users} users")
            }
            EngineError::Solver(e) => write!(f, "solver failure: {e}"),
        }
    }
}

impl core::error::Error for EngineError {}

impl From<LpError> for EngineError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::Infeasible => EngineError::Infeasible,
            other => EngineError::Solver(other),
        }
    }
}

/// A mechanism-specific social choice function.
///
/// `solve` must be deterministic and return a feasible, welfare-optimal
/// allocation for whatever users the scenario holds, including scenarios with
/// users removed.
pub trait OutcomeSolver {
    fn solve(&self, s: &Scenario) -> Result<Allocation, EngineError>;

    /// Declared valuation of user `i` for allocation `a`.
    fn valuation(&self, s: &Scenario, a: &Allocation, i: usize) -> f64;

    /// Welfare contributed by players that are not users (the distributor of case 1).
    fn external_value(&self, _s: &Scenario, _a: &Allocation) -> f64 {
        0.0
    }

    fn welfare(&self, s: &Scenario, a: &Allocation) -> f64 {
        (0..s.n_users()).map(|i| self.valuation(s, a, i)).sum::<f64>() + self.external_value(s, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismResult {
    pub allocation: Allocation,
    pub valuations: Vec<f64>,
    pub payments: Vec<f64>,
    pub utilities: Vec<f64>,
    /// Sum of all players' valuations, including any non-user player.
    pub welfare: f64,
    pub pivotal: Vec<bool>,
}

impl MechanismResult {
    pub fn n_users(&self) -> usize {
        self.payments.len()
    }
}

/// Welfare-optimal allocation for the full user set.
pub fn social_choice<S: OutcomeSolver + ?Sized>(solver: &S, s: &Scenario) -> Result<Allocation, EngineError> {
    solver.solve(s)
}

fn check_index(s: &Scenario, i: usize) -> Result<(), EngineError> {
    if i < s.n_users() {
        Ok(())
    } else {
        Err(EngineError::UserOutOfRange {
            index: i,
            n_users: s.n_users(),
        })
    }
}

/// Groves payment `h(s without i) - sum_{j != i} v_j(f(v))`.
///
/// `h` only sees the scenario with user `i` removed.
pub fn groves_payment<S, H>(solver: &S, s: &Scenario, i: usize, h: H) -> Result<f64, EngineError>
where
    S: OutcomeSolver + ?Sized,
    H: FnOnce(&Scenario) -> Result<f64, EngineError>,
{
    check_index(s, i)?;
    let a = solver.solve(s)?;
    let others = solver.welfare(s, &a) - solver.valuation(s, &a, i);
    Ok(h(&s.without_user(i))? - others)
}

/// Clarke pivot payment of user `i`.
pub fn clarke_payment<S: OutcomeSolver + ?Sized>(solver: &S, s: &Scenario, i: usize) -> Result<f64, EngineError> {
    groves_payment(solver, s, i, |rest| {
        let b = solver.solve(rest)?;
        Ok(solver.welfare(rest, &b))
    })
}

/// Solutions of a scenario and its sub-scenarios, keyed by the removed-user set.
pub struct SolveCache<'a, S: OutcomeSolver + ?Sized> {
    solver: &'a S,
    scenario: &'a Scenario,
    solved: BTreeMap<Vec<usize>, (Allocation, f64)>,
}

impl<'a, S: OutcomeSolver + ?Sized> SolveCache<'a, S> {
    pub fn new(solver: &'a S, scenario: &'a Scenario) -> Self {
        Self {
            solver,
            scenario,
            solved: BTreeMap::new(),
        }
    }

    /// Allocation and welfare of the scenario with the users in `removed`
    /// (ascending original indices) taken out.
    pub fn solve_without(&mut self, removed: &[usize]) -> Result<&(Allocation, f64), EngineError> {
        if !self.solved.contains_key(removed) {
            let mut sub = self.scenario.clone();
            for &i in removed.iter().rev() {
                sub.users.remove(i);
            }
            let a = self.solver.solve(&sub)?;
            let w = self.solver.welfare(&sub, &a);
            self.solved.insert(removed.to_vec(), (a, w));
        }
        Ok(&self.solved[removed])
    }

    pub fn len(&self) -> usize {
        self.solved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solved.is_empty()
    }

    /// Clarke payments of every user against the full-scenario optimum.
    pub fn clarke_payments(&mut self) -> Result<Vec<f64>, EngineError> {
        let (a, welfare) = self.solve_without(&[])?.clone();
        let n = self.scenario.n_users();
        let mut payments = Vec::with_capacity(n);
        for i in 0..n {
            let others = welfare - self.solver.valuation(self.scenario, &a, i);
            let without = self.solve_without(&[i])?.1;
            payments.push(without - others);
        }
        Ok(payments)
    }
}

/// Runs the scenario's mechanism with the default tolerance.
pub fn run_mechanism(s: &Scenario) -> Result<MechanismResult, EngineError> {
    run_mechanism_with(s, Tolerance::default())
}

pub fn run_mechanism_with(s: &Scenario, tol: Tolerance) -> Result<MechanismResult, EngineError> {
    let violations = validate_scenario(s);
    if !violations.is_empty() {
        return Err(EngineError::InvalidScenario(violations));
    }
    let kind: MechanismKind = s.mechanism;
    let mut cache = SolveCache::new(&kind, s);
    let (allocation, welfare) = cache.solve_without(&[])?.clone();
    let valuations: Vec<f64> = (0..s.n_users()).map(|i| kind.valuation(s, &allocation, i)).collect();
    let payments = if kind.uses_clarke() {
        cache.clarke_payments()?
    } else {
        (0..s.n_users())
            .map(|i| mechanisms::case6_payment(s, &allocation, i))
            .collect()
    };
    let utilities: Vec<f64> = valuations.iter().zip(&payments).map(|(v, p)| v - p).collect();
    let pivotal = payments.iter().map(|&p| p > tol.eps).collect();
    Ok(MechanismResult {
        allocation,
        valuations,
        payments,
        utilities,
        welfare,
        pivotal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismKind::*;
    use alloc::vec;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6 * (1.0 + b.abs())
    }

    #[test]
    fn social_choice_examples() {
        let s = Scenario::single_slot(&[2.0, 3.0], 10.0, Case3);
        assert_eq!(social_choice(&Case3, &s).unwrap().rows(), &[vec![2.0], vec![3.0]]);

        let s = Scenario::single_slot(&[5.0, 4.0, 3.0], 7.0, Case2);
        assert_eq!(
            social_choice(&Case2, &s).unwrap().rows(),
            &[vec![0.0], vec![4.0], vec![3.0]]
        );

        for kind in MechanismKind::ALL {
            let s = Scenario::single_slot(&[], 5.0, kind);
            let a = social_choice(&kind, &s).unwrap();
            assert_eq!(a.n_users(), 0);
            if kind != Case1 {
                assert_eq!(kind.welfare(&s, &a), 0.0);
            }
        }
    }

    #[test]
    fn groves_with_zero_h() {
        let s = Scenario::single_slot(&[2.0, 3.0], 10.0, Case3);
        assert_eq!(groves_payment(&Case3, &s, 0, |_| Ok(0.0)).unwrap(), -3.0);
        let single = Scenario::single_slot(&[4.0], 10.0, Case3);
        assert_eq!(groves_payment(&Case3, &single, 0, |_| Ok(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn groves_with_clarke_term_is_clarke() {
        let s = Scenario::single_slot(&[5.0, 4.0, 3.0], 7.0, Case2);
        for i in 0..3 {
            let h = groves_payment(&Case2, &s, i, |rest| {
                let b = Case2.solve(rest)?;
                Ok(Case2.welfare(rest, &b))
            })
            .unwrap();
            assert_eq!(h, clarke_payment(&Case2, &s, i).unwrap());
        }
    }

    #[test]
    fn clarke_examples() {
        let s = Scenario::single_slot(&[5.0, 4.0, 3.0], 7.0, Case2);
        assert_eq!(clarke_payment(&Case2, &s, 1).unwrap(), 2.0);

        let s = Scenario::single_slot(&[4.0, 8.0], 6.0, Case3);
        assert!(close(clarke_payment(&Case3, &s, 0).unwrap(), 2.0));

        let s = Scenario::single_slot(&[2.0, 3.0], 10.0, Case3);
        for i in 0..2 {
            assert_eq!(clarke_payment(&Case3, &s, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn index_out_of_range() {
        let s = Scenario::single_slot(&[1.0], 2.0, Case3);
        assert_eq!(
            clarke_payment(&Case3, &s, 3),
            Err(EngineError::UserOutOfRange { index: 3, n_users: 1 })
        );
    }

    #[test]
    fn run_case1_examples() {
        let r = run_mechanism(&Scenario::single_slot(&[3.0, 4.0], 10.0, Case1)).unwrap();
        assert_eq!(r.allocation.rows(), &[vec![3.0], vec![4.0]]);
        assert_eq!(r.payments, vec![0.0, 0.0]);
        assert_eq!(r.welfare, 3.0);

        let r = run_mechanism(&Scenario::single_slot(&[6.0, 5.0], 10.0, Case1)).unwrap();
        assert_eq!(r.allocation.rows(), &[vec![0.0], vec![0.0]]);
        assert_eq!(r.payments, vec![5.0, 4.0]);
        assert_eq!(r.utilities, vec![-5.0, -4.0]);
        assert_eq!(r.pivotal, vec![true, true]);
    }

    #[test]
    fn run_case5_example() {
        let r = run_mechanism(&Scenario::single_slot(&[2.0, 6.0], 4.0, Case5)).unwrap();
        assert_eq!(r.allocation.rows(), &[vec![1.0], vec![3.0]]);
        assert_eq!(r.payments, vec![1.0, 1.0]);
        assert_eq!(r.utilities, vec![0.0, 2.0]);
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let s = Scenario::single_slot(&[-1.0], 2.0, Case3);
        assert!(matches!(run_mechanism(&s), Err(EngineError::InvalidScenario(v)) if v.len() == 1));
    }

    #[test]
    fn infeasible_case4() {
        let s = Scenario::from_series(&[vec![6.0, 6.0]], vec![5.0, 5.0], 1.0, Case4);
        assert_eq!(run_mechanism(&s), Err(EngineError::Infeasible));
    }

    #[test]
    fn cache_solves_each_subproblem_once() {
        let s = Scenario::single_slot(&[5.0, 4.0, 3.0], 7.0, Case2);
        let mut cache = SolveCache::new(&Case2, &s);
        let first = cache.clarke_payments().unwrap();
        assert_eq!(cache.len(), 4);
        let second = cache.clarke_payments().unwrap();
        assert_eq!(cache.len(), 4);
        assert_eq!(first, second);
        for (i, p) in first.iter().enumerate() {
            assert_eq!(*p, clarke_payment(&Case2, &s, i).unwrap());
        }
    }

    #[test]
    fn result_identities() {
        let s = Scenario::from_series(
            &[vec![3.0, 1.0], vec![2.0, 4.0], vec![0.0, 2.5]],
            vec![4.0, 5.0],
            0.5,
            Case5,
        );
        let r = run_mechanism(&s).unwrap();
        for i in 0..3 {
            assert_eq!(r.utilities[i], r.valuations[i] - r.payments[i]);
            assert_eq!(r.pivotal[i], r.payments[i] > DEFAULT_EPS);
        }
        assert!(close(r.welfare, r.valuations.iter().sum()));
        assert!(r.allocation.is_feasible(&s.production, DEFAULT_EPS));
    }
}
