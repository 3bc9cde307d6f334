//! Case 3: divisible fill. Any split of production with `a[i] <= x[i]` is
//! optimal once the whole production is used; the canonical pick is
//! proportional rationing.

use alloc::vec::Vec;

use crate::engine::Allocation;
use crate::model::Scenario;
use crate::solvers::proportional_ration;

pub fn case3_solve(s: &Scenario) -> Allocation {
    if s.n_slots() == 0 {
        return Allocation::zeros(s.n_users(), 0);
    }
    let demands: Vec<f64> = (0..s.n_users()).map(|i| s.demand(i, 0)).collect();
    let grants = proportional_ration(&demands, s.production.values[0]);
    Allocation::from_rows(grants.into_iter().map(|g| alloc::vec![g]).collect(), 1)
}
