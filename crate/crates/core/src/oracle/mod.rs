//! Independent verifiers: brute-force outcomes, misreport sweeps and
//! per-scenario property reports.

mod brute_force;
mod misreport;
mod properties;

pub use brute_force::{brute_force_outcome, BruteForce, OracleError, DEFAULT_BUDGET, DEFAULT_RESOLUTION};
pub use misreport::{
    experienced_utility, misreport_sweep, GridError, MisreportGrid, MisreportOutcome, UtilityConvention,
};
pub use properties::{
    check_outcome, check_properties, check_result, CheckOptions, MarginSummary, Property, PropertyCheck,
    PropertyReport, Verdict, Witness, TRUTH_TOL,
};
