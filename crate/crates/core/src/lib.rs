//! Mechanism-design engine for allocating a capped divisible commodity
//! (electric power) among consumers.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`model`]: problem instances ([`Scenario`]), validation and derived series.
//! - [`engine`]: welfare maximization over a pluggable [`OutcomeSolver`],
//!   Groves and Clarke pivot payments, and result assembly.
//! - [`mechanisms`]: the six allocation mechanisms ([`MechanismKind`]).
//! - [`solvers`]: subset-sum maximization, a dense simplex and proportional rationing.
//! - [`oracle`]: brute-force verifiers and game-theoretic property sweeps.
//!
//! File formats, scenario generation and the command line live in the
//! `dsm-vcg` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod engine;
pub mod mechanisms;
pub mod model;
pub mod oracle;
pub mod solvers;

pub use engine::{
    clarke_payment, groves_payment, run_mechanism, run_mechanism_with, social_choice, Allocation, EngineError,
    MechanismResult, OutcomeSolver, Tolerance, DEFAULT_EPS,
};
pub use mechanisms::MechanismKind;
pub use model::{
    aggregate_demand, energy_of, headroom, validate_scenario, PenaltyParams, PowerSeries, Scenario, UserProfile,
    Violation, ViolationCode,
};
