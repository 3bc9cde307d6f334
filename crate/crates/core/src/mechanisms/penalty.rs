use crate::engine::Allocation;
use crate::model::Scenario;

/// Aggregate grant above the safe band `c * P(t)` in slot `t`, or zero.
pub fn penalty_excess(s: &Scenario, a: &Allocation, t: usize) -> f64 {
    (a.column_sum(t) - s.production.values[t] * s.params.c).max(0.0)
}

/// Case 6 payment: the user's granted energy plus a congestion charge of
/// `k` per kW above the safe band, integrated over slots. Every user pays the
/// same charge.
pub fn case6_payment(s: &Scenario, a: &Allocation, i: usize) -> f64 {
    let dt = s.slot_duration();
    (0..s.n_slots())
        .map(|t| (a.get(i, t) + s.params.k * penalty_excess(s, a, t)) * dt)
        .sum()
}
