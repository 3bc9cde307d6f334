//! Cases 4 and 6: time-shifted allocation solved as a linear program.
//!
//! The capped valuation `sum_t min(a_i(t), x_i(t)) dt` is linearized with a
//! "useful power" variable `u_i(t) <= a_i(t)`, `u_i(t) <= x_i(t)`. Both cases
//! share the per-slot capacity constraint; case 4 adds a per-user energy
//! floor (granted energy at least demanded energy) and case 6 a ceiling.
//!
//! Among welfare-optimal solutions the dispatched energy is minimized, then
//! each grant in row-major order is minimized in turn. Each stage pins the
//! previous optimum exactly; the simplex phase-one tolerance absorbs rounding.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Allocation, EngineError};
use crate::model::Scenario;
use crate::solvers::{lp_solve, LinearProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnergyBound {
    Floor,
    Ceiling,
}

pub fn case4_solve(s: &Scenario) -> Result<Allocation, EngineError> {
    solve_shifting(s, EnergyBound::Floor)
}

/// Always feasible: the zero allocation satisfies every ceiling.
pub fn case6_solve(s: &Scenario) -> Result<Allocation, EngineError> {
    solve_shifting(s, EnergyBound::Ceiling)
}

fn solve_shifting(s: &Scenario, bound: EnergyBound) -> Result<Allocation, EngineError> {
    let n = s.n_users();
    let slots = s.n_slots();
    if n == 0 {
        return Ok(Allocation::zeros(0, slots));
    }
    let dt = s.slot_duration();
    let cells = n * slots;
    let a_var = |i: usize, t: usize| i * slots + t;
    let u_var = |i: usize, t: usize| cells + i * slots + t;
    let n_vars = 2 * cells;

    let mut welfare_obj = vec![0.0; n_vars];
    let mut dispatch = vec![0.0; n_vars];
    for k in 0..cells {
        welfare_obj[cells + k] = dt;
        dispatch[k] = dt;
    }

    let mut lp = LinearProgram::new(welfare_obj.clone());
    for i in 0..n {
        for t in 0..slots {
            let mut row = vec![0.0; n_vars];
            row[u_var(i, t)] = 1.0;
            row[a_var(i, t)] = -1.0;
            lp.add_le(row, 0.0);
            let mut row = vec![0.0; n_vars];
            row[u_var(i, t)] = 1.0;
            lp.add_le(row, s.demand(i, t));
        }
    }
    for t in 0..slots {
        let mut row = vec![0.0; n_vars];
        for i in 0..n {
            row[a_var(i, t)] = 1.0;
        }
        lp.add_le(row, s.production.values[t]);
    }
    for i in 0..n {
        let mut row = vec![0.0; n_vars];
        for t in 0..slots {
            row[a_var(i, t)] = dt;
        }
        let demanded: f64 = s.users[i].demand.values.iter().map(|x| x * dt).sum();
        match bound {
            EnergyBound::Floor => lp.add_ge(row, demanded),
            EnergyBound::Ceiling => lp.add_le(row, demanded),
        };
    }

    let best = lp_solve(&lp)?;
    lp.add_ge(welfare_obj, best.value);

    lp.objective = dispatch.iter().map(|c| -c).collect();
    let least = lp_solve(&lp)?;
    let min_dispatch = -least.value;
    lp.add_le(dispatch, min_dispatch);

    let mut x = least.x;
    for k in 0..cells {
        let mut obj = vec![0.0; n_vars];
        obj[k] = -1.0;
        lp.objective = obj;
        let sol = lp_solve(&lp)?;
        let v = -sol.value;
        let mut row = vec![0.0; n_vars];
        row[k] = 1.0;
        lp.add_le(row, v);
        x = sol.x;
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..slots).map(|t| x[a_var(i, t)].max(0.0)).collect())
        .collect();
    Ok(Allocation::from_rows(rows, slots))
}
