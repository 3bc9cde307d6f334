//! The six allocation mechanisms.
//!
//! | kind  | outcome set                                        | payment       |
//! |-------|----------------------------------------------------|---------------|
//! | case1 | everyone served or no one (distributor is a player) | Clarke        |
//! | case2 | subset of users served in full under capacity       | Clarke        |
//! | case3 | divisible fill, `a[i] <= x[i]`, `sum a <= P`        | Clarke        |
//! | case4 | time-shifted power with per-user energy floors      | Clarke        |
//! | case5 | fixed proportional rationing rule per slot          | Clarke        |
//! | case6 | time-shifted power with per-user energy ceilings    | usage+penalty |

mod all_or_nothing;
mod fill;
mod penalty;
mod proportional;
mod shifting;
mod subset;

use core::fmt;
use core::str::FromStr;

use crate::engine::{Allocation, EngineError, OutcomeSolver};
use crate::model::Scenario;

pub use all_or_nothing::{case1_served, case1_solve};
pub use fill::case3_solve;
pub use penalty::{case6_payment, penalty_excess};
pub use proportional::case5_allocate;
pub use shifting::{case4_solve, case6_solve};
pub use subset::case2_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MechanismKind {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 6] = [
        MechanismKind::Case1,
        MechanismKind::Case2,
        MechanismKind::Case3,
        MechanismKind::Case4,
        MechanismKind::Case5,
        MechanismKind::Case6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MechanismKind::Case1 => "case1",
            MechanismKind::Case2 => "case2",
            MechanismKind::Case3 => "case3",
            MechanismKind::Case4 => "case4",
            MechanismKind::Case5 => "case5",
            MechanismKind::Case6 => "case6",
        }
    }

    /// Cases 1 to 3 have no notion of time.
    pub fn single_slot_only(self) -> bool {
        matches!(self, MechanismKind::Case1 | MechanismKind::Case2 | MechanismKind::Case3)
    }

    /// Everything except case 6 charges Clarke pivot payments.
    pub fn uses_clarke(self) -> bool {
        self != MechanismKind::Case6
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMechanism;

impl fmt::Display for UnknownMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of case1..case6")
    }
}

impl core::error::Error for UnknownMechanism {}

impl FromStr for MechanismKind {
    type Err = UnknownMechanism;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or(UnknownMechanism)
    }
}

/// Energy actually useful to user `i`: grants above demand are worth nothing.
pub fn capped_valuation(s: &Scenario, a: &Allocation, i: usize) -> f64 {
    let dt = s.slot_duration();
    a.user(i)
        .iter()
        .zip(&s.users[i].demand.values)
        .map(|(g, x)| g.min(*x) * dt)
        .sum()
}

impl OutcomeSolver for MechanismKind {
    fn solve(&self, s: &Scenario) -> Result<Allocation, EngineError> {
        match self {
            MechanismKind::Case1 => Ok(case1_solve(s)),
            MechanismKind::Case2 => Ok(case2_solve(s)),
            MechanismKind::Case3 => Ok(case3_solve(s)),
            MechanismKind::Case4 => case4_solve(s),
            MechanismKind::Case5 => Ok(case5_allocate(s)),
            MechanismKind::Case6 => case6_solve(s),
        }
    }

    fn valuation(&self, s: &Scenario, a: &Allocation, i: usize) -> f64 {
        match self {
            MechanismKind::Case1 => all_or_nothing::user_valuation(s, a, i),
            _ => capped_valuation(s, a, i),
        }
    }

    fn external_value(&self, s: &Scenario, a: &Allocation) -> f64 {
        match self {
            MechanismKind::Case1 => all_or_nothing::distributor_valuation(s, a),
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for k in MechanismKind::ALL {
            assert_eq!(k.as_str().parse::<MechanismKind>(), Ok(k));
        }
        assert!("case7".parse::<MechanismKind>().is_err());
    }
}
