//! Case 2: serve a subset of users in full, maximizing served demand under
//! the production cap.

use alloc::vec::Vec;

use crate::engine::Allocation;
use crate::model::Scenario;
use crate::solvers::subset_sum_max;

/// Single slot. Ties between equally valuable subsets go to the
/// lexicographically smallest ascending index sequence.
pub fn case2_solve(s: &Scenario) -> Allocation {
    let mut a = Allocation::zeros(s.n_users(), s.n_slots());
    if s.n_slots() == 0 {
        return a;
    }
    let weights: Vec<f64> = (0..s.n_users()).map(|i| s.demand(i, 0)).collect();
    let choice = subset_sum_max(&weights, s.production.values[0]);
    let mut rows: Vec<Vec<f64>> = a.rows().to_vec();
    for i in choice.indices {
        rows[i][0] = weights[i];
    }
    a = Allocation::from_rows(rows, s.n_slots());
    a
}
