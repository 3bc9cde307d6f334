//! Case 5: fixed rule. Each slot grants demands in full when they fit and
//! rations proportionally otherwise.

use alloc::vec::Vec;

use crate::engine::Allocation;
use crate::model::Scenario;
use crate::solvers::proportional_ration;

pub fn case5_allocate(s: &Scenario) -> Allocation {
    let n = s.n_users();
    let mut rows = alloc::vec![alloc::vec![0.0; s.n_slots()]; n];
    for t in 0..s.n_slots() {
        let demands: Vec<f64> = (0..n).map(|i| s.demand(i, t)).collect();
        for (row, g) in rows.iter_mut().zip(proportional_ration(&demands, s.production.values[t])) {
            row[t] = g;
        }
    }
    Allocation::from_rows(rows, s.n_slots())
}
