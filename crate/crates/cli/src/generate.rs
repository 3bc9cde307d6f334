//! Seeded scenario generation.
//!
//! Demands are drawn uniformly from `demand_range` and quantized to 1e-3 kW,
//! so the serialized form of a generated scenario is short and stable.

use std::fmt;
use std::str::FromStr;

use dsm_vcg_core::{MechanismKind, PenaltyParams, PowerSeries, Scenario, UserProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Steps per kW. Dividing by it yields the double nearest the decimal value.
const STEPS: f64 = 1000.0;

fn quantize_floor(v: f64) -> f64 {
    (v * STEPS + 1e-6).floor() / STEPS
}

fn quantize_ceil(v: f64) -> f64 {
    (v * STEPS - 1e-6).ceil() / STEPS
}

fn quantize(v: f64) -> f64 {
    (v * STEPS).round() / STEPS
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProductionPolicy {
    /// `P(t) = 0.8 * sum_i x_i(t)`, rounded down.
    Tight,
    /// `P(t) = 1.2 * sum_i x_i(t)`, rounded up.
    Loose,
    /// The same constant in every slot.
    Fixed(f64),
    /// A constant at `factor` times the mean aggregate demand, rounded up.
    /// Total supply then covers `factor` times total demand, which keeps
    /// energy floors satisfiable for `factor >= 1`.
    Flat(f64),
}

impl fmt::Display for ProductionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductionPolicy::Tight => f.write_str("tight"),
            ProductionPolicy::Loose => f.write_str("loose"),
            ProductionPolicy::Fixed(p) => write!(f, "fixed:{p}"),
            ProductionPolicy::Flat(k) => write!(f, "flat:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown production policy {0:?}; expected tight, loose, fixed:<kW> or flat:<factor>")]
pub struct PolicyParseError(String);

impl FromStr for ProductionPolicy {
    type Err = PolicyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PolicyParseError(s.to_string());
        let number = |v: &str| -> Result<f64, PolicyParseError> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(err)
        };
        match s.split_once(':') {
            None if s == "tight" => Ok(ProductionPolicy::Tight),
            None if s == "loose" => Ok(ProductionPolicy::Loose),
            Some(("fixed", v)) => Ok(ProductionPolicy::Fixed(number(v)?)),
            Some(("flat", v)) => Ok(ProductionPolicy::Flat(number(v)?)),
            _ => Err(err()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub seed: u64,
    pub n_users: usize,
    pub n_slots: usize,
    /// Inclusive kW bounds, `0 <= lo <= hi`.
    pub demand_range: (f64, f64),
    pub policy: ProductionPolicy,
    pub mechanism: MechanismKind,
    pub slot_duration: f64,
    pub params: PenaltyParams,
}

impl GenerateConfig {
    pub fn new(seed: u64, n_users: usize, n_slots: usize, demand_range: (f64, f64), policy: ProductionPolicy) -> Self {
        Self {
            seed,
            n_users,
            n_slots,
            demand_range,
            policy,
            mechanism: MechanismKind::Case3,
            slot_duration: 1.0,
            params: PenaltyParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("need at least one slot")]
    NoSlots,
    #[error("demand range ({0}, {1}) must satisfy 0 <= lo <= hi")]
    BadRange(f64, f64),
}

pub fn generate_scenario(cfg: &GenerateConfig) -> Result<Scenario, GenerateError> {
    let (lo, hi) = cfg.demand_range;
    if cfg.n_slots == 0 {
        return Err(GenerateError::NoSlots);
    }
    if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
        return Err(GenerateError::BadRange(lo, hi));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rows: Vec<Vec<f64>> = (0..cfg.n_users)
        .map(|_| (0..cfg.n_slots).map(|_| quantize(rng.gen_range(lo..=hi))).collect())
        .collect();
    Ok(assemble(
        rows,
        cfg.n_slots,
        cfg.policy,
        cfg.mechanism,
        cfg.slot_duration,
        cfg.params,
    ))
}

fn assemble(
    rows: Vec<Vec<f64>>,
    slots: usize,
    policy: ProductionPolicy,
    mechanism: MechanismKind,
    dt: f64,
    params: PenaltyParams,
) -> Scenario {
    let aggregate: Vec<f64> = (0..slots).map(|t| rows.iter().map(|r| r[t]).sum()).collect();
    let production = match policy {
        ProductionPolicy::Tight => aggregate.iter().map(|a| quantize_floor(0.8 * a)).collect(),
        ProductionPolicy::Loose => aggregate.iter().map(|a| quantize_ceil(1.2 * a).max(*a)).collect(),
        ProductionPolicy::Fixed(p) => vec![p; slots],
        ProductionPolicy::Flat(k) => {
            let mean = aggregate.iter().sum::<f64>() / slots as f64;
            vec![quantize_ceil(k * mean); slots]
        }
    };
    let users = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| UserProfile::new(format!("u{}", i + 1), PowerSeries::new(r, dt)))
        .collect();
    Scenario::new(users, PowerSeries::new(production, dt), mechanism).with_params(params)
}

/// Scenario used by property sweeps: size, policy and penalty parameters are
/// drawn from the seed within limits that keep every oracle tractable for
/// `mechanism`. About one demand in ten is zero.
pub fn sweep_scenario(seed: u64, mechanism: MechanismKind) -> Scenario {
    use MechanismKind::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (max_users, slots) = match mechanism {
        Case1 | Case3 | Case5 => (8, if mechanism == Case5 { rng.gen_range(1..=4) } else { 1 }),
        Case2 => (12, 1),
        Case4 | Case6 => (3, rng.gen_range(1..=3)),
    };
    let n = rng.gen_range(0..=max_users);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..slots)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        0.0
                    } else {
                        quantize(rng.gen_range(0.1..=10.0))
                    }
                })
                .collect()
        })
        .collect();
    let policy = match (mechanism, rng.gen_range(0..3)) {
        // a tight supply can never cover case 4's energy floors
        (Case4, 0) => ProductionPolicy::Flat(1.0),
        (Case4, _) => ProductionPolicy::Flat(quantize(rng.gen_range(1.0..=1.5))),
        (_, 0) => ProductionPolicy::Tight,
        (_, 1) => ProductionPolicy::Loose,
        _ => ProductionPolicy::Flat(quantize(rng.gen_range(0.5..=1.5))),
    };
    let params = PenaltyParams {
        c: [0.5, 0.75, 0.9, 1.0][rng.gen_range(0..4)],
        k: [0.5, 1.0, 2.0][rng.gen_range(0..3)],
    };
    assemble(rows, slots, policy, mechanism, 1.0, params)
}
