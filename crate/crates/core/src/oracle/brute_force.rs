//! Exhaustive search over a discretized outcome set.
//!
//! Deliberately shares no code with the mechanism solvers: it re-derives each
//! case's constraints and valuations and enumerates grid points one by one.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::Allocation;
use crate::mechanisms::MechanismKind;
use crate::model::Scenario;

pub const DEFAULT_RESOLUTION: f64 = 0.5;
pub const DEFAULT_BUDGET: u64 = 10_000_000;
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub allocation: Allocation,
    pub welfare: f64,
    /// Grid points evaluated.
    pub points: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    BudgetExceeded {
        points: f64,
        budget: u64,
    },
    /// No grid point satisfies the constraints.
    NoFeasiblePoint,
    InvalidResolution(f64),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { points, budget } => {
                write!(f, "grid has {points:.3e} points, budget is {budget}")
            }
            OracleError::NoFeasiblePoint => f.write_str("no grid point is feasible"),
            OracleError::InvalidResolution(r) => write!(f, "resolution {r} must be positive"),
        }
    }
}

impl core::error::Error for OracleError {}

/// `0, r, 2r, ..., hi`, with `hi` itself appended when it is not a multiple of `r`.
fn grid(hi: f64, r: f64) -> Vec<f64> {
    let steps = libm::floor(hi / r + 1e-9) as usize;
    let mut g: Vec<f64> = (0..=steps).map(|k| k as f64 * r).collect();
    if g.last().is_some_and(|&last| hi - last > 1e-12) {
        g.push(hi);
    }
    g
}

/// Welfare-maximal outcome by exhaustive enumeration.
///
/// Cases 1 and 2 enumerate their finite outcome sets exactly. Case 3 grids
/// each grant over `[0, x_i]`; cases 4 and 6 grid each cell over `[0, P(t)]`
/// since grants may exceed demand. Case 5 has no optimization and evaluates
/// its rule directly.
pub fn brute_force_outcome(s: &Scenario, resolution: f64, budget: u64) -> Result<BruteForce, OracleError> {
    // also rejects NaN
    if resolution.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
        return Err(OracleError::InvalidResolution(resolution));
    }
    match s.mechanism {
        MechanismKind::Case1 => Ok(binary(s)),
        MechanismKind::Case2 => subsets(s, budget),
        MechanismKind::Case3 => {
            let grids = (0..s.n_users()).map(|i| grid(s.demand(i, 0), resolution)).collect();
            enumerate(s, grids, budget)
        }
        MechanismKind::Case4 | MechanismKind::Case6 => {
            let mut grids = Vec::new();
            for _ in 0..s.n_users() {
                for t in 0..s.n_slots() {
                    grids.push(grid(s.production.values[t], resolution));
                }
            }
            enumerate(s, grids, budget)
        }
        MechanismKind::Case5 => Ok(rule(s)),
    }
}

fn energy(values: &[f64], dt: f64) -> f64 {
    values.iter().map(|v| v * dt).sum()
}

fn binary(s: &Scenario) -> BruteForce {
    let dt = s.slot_duration();
    let mut best = (Allocation::zeros(s.n_users(), s.n_slots()), 0.0);
    let served: Vec<Vec<f64>> = s.users.iter().map(|u| u.demand.values.clone()).collect();
    let fits = (0..s.n_slots()).all(|t| served.iter().map(|r| r[t]).sum::<f64>() <= s.production.values[t]);
    let w = energy(&s.production.values, dt) - served.iter().map(|r| energy(r, dt)).sum::<f64>();
    if fits && w >= best.1 {
        best = (Allocation::from_rows(served, s.n_slots()), w);
    }
    BruteForce {
        allocation: best.0,
        welfare: best.1,
        points: 2,
    }
}

fn subsets(s: &Scenario, budget: u64) -> Result<BruteForce, OracleError> {
    let n = s.n_users();
    if n >= 63 || (1u64 << n) > budget {
        return Err(OracleError::BudgetExceeded {
            points: libm::pow(2.0, n as f64),
            budget,
        });
    }
    let cap = s.production.values[0];
    let mut best_mask = 0u64;
    let mut best = 0.0;
    for mask in 0u64..(1 << n) {
        let total: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s.demand(i, 0)).sum();
        if total <= cap + SLACK && total > best {
            best = total;
            best_mask = mask;
        }
    }
    let rows = (0..n)
        .map(|i| vec![if best_mask >> i & 1 == 1 { s.demand(i, 0) } else { 0.0 }])
        .collect();
    Ok(BruteForce {
        allocation: Allocation::from_rows(rows, 1),
        welfare: best,
        points: 1 << n,
    })
}

fn rule(s: &Scenario) -> BruteForce {
    let n = s.n_users();
    let dt = s.slot_duration();
    let mut rows = vec![vec![0.0; s.n_slots()]; n];
    for t in 0..s.n_slots() {
        let total: f64 = (0..n).map(|i| s.demand(i, t)).sum();
        let p = s.production.values[t];
        for (i, row) in rows.iter_mut().enumerate() {
            let x = s.demand(i, t);
            row[t] = if total <= p { x } else { x / total * p };
        }
    }
    let welfare = (0..n)
        .map(|i| {
            (0..s.n_slots())
                .map(|t| rows[i][t].min(s.demand(i, t)) * dt)
                .sum::<f64>()
        })
        .sum();
    BruteForce {
        allocation: Allocation::from_rows(rows, s.n_slots()),
        welfare,
        points: 1,
    }
}

/// Odometer over the cartesian product of `grids`; cells are user-major.
fn enumerate(s: &Scenario, grids: Vec<Vec<f64>>, budget: u64) -> Result<BruteForce, OracleError> {
    let n = s.n_users();
    let slots = s.n_slots();
    let dt = s.slot_duration();
    let size: f64 = grids.iter().map(|g| g.len() as f64).product();
    if size > budget as f64 {
        return Err(OracleError::BudgetExceeded { points: size, budget });
    }
    let mechanism = s.mechanism;
    let demanded: Vec<f64> = s.users.iter().map(|u| energy(&u.demand.values, dt)).collect();

    let mut idx = vec![0usize; grids.len()];
    let mut point = vec![0.0; grids.len()];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut points = 0u64;
    loop {
        points += 1;
        for (k, &j) in idx.iter().enumerate() {
            point[k] = grids[k][j];
        }
        let cell = |i: usize, t: usize| point[i * slots + t];
        let capacity_ok = (0..slots).all(|t| (0..n).map(|i| cell(i, t)).sum::<f64>() <= s.production.values[t] + SLACK);
        let bounds_ok = match mechanism {
            MechanismKind::Case4 => {
                (0..n).all(|i| energy(&point[i * slots..(i + 1) * slots], dt) >= demanded[i] - SLACK)
            }
            MechanismKind::Case6 => {
                (0..n).all(|i| energy(&point[i * slots..(i + 1) * slots], dt) <= demanded[i] + SLACK)
            }
            _ => true,
        };
        if capacity_ok && bounds_ok {
            let w: f64 = (0..n)
                .map(|i| (0..slots).map(|t| cell(i, t).min(s.demand(i, t)) * dt).sum::<f64>())
                .sum();
            if best.as_ref().is_none_or(|(_, bw)| w > *bw) {
                best = Some((point.clone(), w));
            }
        }

        // advance
        let mut k = grids.len();
        loop {
            if k == 0 {
                let (cells, welfare) = best.ok_or(OracleError::NoFeasiblePoint)?;
                let rows = (0..n).map(|i| cells[i * slots..(i + 1) * slots].to_vec()).collect();
                return Ok(BruteForce {
                    allocation: Allocation::from_rows(rows, slots),
                    welfare,
                    points,
                });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}
