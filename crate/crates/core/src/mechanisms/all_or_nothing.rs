//! Case 1: binary outcome with the distributor as an extra player.
//!
//! Users value being served at minus their demanded energy; the distributor
//! values serving at the produced energy. Welfare of serving is therefore
//! production minus aggregate demand, and everyone is served iff that is
//! non-negative.

use crate::engine::Allocation;
use crate::model::{energy_of, Scenario};

pub fn case1_solve(s: &Scenario) -> Allocation {
    let served_welfare = energy_of(&s.production) - s.users.iter().map(|u| energy_of(&u.demand)).sum::<f64>();
    let fits =
        (0..s.n_slots()).all(|t| (0..s.n_users()).map(|i| s.demand(i, t)).sum::<f64>() <= s.production.values[t]);
    if served_welfare >= 0.0 && fits {
        Allocation::from_rows(s.users.iter().map(|u| u.demand.values.clone()).collect(), s.n_slots())
    } else {
        Allocation::zeros(s.n_users(), s.n_slots())
    }
}

/// Whether `a` is the "everyone served" outcome: every row equals its demand.
pub fn case1_served(s: &Scenario, a: &Allocation) -> bool {
    s.users
        .iter()
        .enumerate()
        .all(|(i, u)| a.user(i) == u.demand.values.as_slice())
}

pub(super) fn user_valuation(s: &Scenario, a: &Allocation, i: usize) -> f64 {
    if case1_served(s, a) {
        -energy_of(&s.users[i].demand)
    } else {
        0.0
    }
}

pub(super) fn distributor_valuation(s: &Scenario, a: &Allocation) -> f64 {
    if case1_served(s, a) {
        energy_of(&s.production)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismKind::Case1;
    use alloc::vec;

    #[test]
    fn examples() {
        let a = case1_solve(&Scenario::single_slot(&[3.0, 4.0], 10.0, Case1));
        assert_eq!(a.rows(), &[vec![3.0], vec![4.0]]);
        let a = case1_solve(&Scenario::single_slot(&[6.0, 5.0], 10.0, Case1));
        assert_eq!(a.rows(), &[vec![0.0], vec![0.0]]);
        // boundary: production exactly covers demand
        let a = case1_solve(&Scenario::single_slot(&[4.0, 6.0], 10.0, Case1));
        assert_eq!(a.rows(), &[vec![4.0], vec![6.0]]);
    }

    #[test]
    fn valuations() {
        let s = Scenario::single_slot(&[3.0, 4.0], 10.0, Case1);
        let a = case1_solve(&s);
        assert!(case1_served(&s, &a));
        assert_eq!(user_valuation(&s, &a, 1), -4.0);
        assert_eq!(distributor_valuation(&s, &a), 10.0);
    }
}
