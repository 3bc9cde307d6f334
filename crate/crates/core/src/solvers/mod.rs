//! Exact optimization kernels shared by the mechanisms.

mod ration;
mod simplex;
mod subset_sum;

pub use ration::proportional_ration;
pub use simplex::{lp_solve, Constraint, LinearProgram, LpError, LpSolution, Relation, FEAS_TOL};
pub use subset_sum::{subset_sum_max, SubsetChoice, CAPACITY_SLACK, DP_RESOLUTION, EXACT_ITEM_LIMIT};
