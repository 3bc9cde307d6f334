//! Command-line verbs. Each maps to one library entry point.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsm_vcg_core::oracle::{
    brute_force_outcome, check_outcome, CheckOptions, MisreportGrid, OracleError, UtilityConvention, Verdict,
    DEFAULT_BUDGET, DEFAULT_RESOLUTION,
};
use dsm_vcg_core::{run_mechanism_with, EngineError, MechanismKind, PenaltyParams, Scenario, Tolerance, DEFAULT_EPS};

use crate::generate::{generate_scenario, GenerateConfig, ProductionPolicy};
use crate::report::{build_report, write_report};
use crate::scenario_file::{load_scenario, save_scenario, scenario_to_json, write_atomic, LoadError};
use crate::sweep::{run_sweep, summarize, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "dsm-vcg", version, about = "Truthful allocation of capped electric power")]
pub struct Cli {
    /// Numerical tolerance for capacity and sign checks.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario's mechanism and write a report.
    Allocate(AllocateArgs),
    /// Check game-theoretic and feasibility properties; exit 4 on a violation.
    Verify(VerifyArgs),
    /// Property campaign over seeded random scenarios.
    Sweep(SweepArgs),
    /// Compare engine welfare against exhaustive search.
    Oracle(OracleArgs),
    /// Write a seeded random scenario.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Experienced,
    Model,
}

impl From<Convention> for UtilityConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Experienced => UtilityConvention::Experienced,
            Convention::Model => UtilityConvention::ModelValuation,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Misreport multipliers; must include 1.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// How a misreporting user values the outcome.
    #[arg(long, value_enum, default_value_t = Convention::Experienced)]
    pub convention: Convention,
    /// Brute-force grid step in kW.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    /// Maximum grid points the brute-force oracle may evaluate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Skip misreport sweeps.
    #[arg(long)]
    pub no_truthfulness: bool,
    /// Skip the brute-force welfare comparison.
    #[arg(long)]
    pub no_oracle: bool,
}

impl CheckArgs {
    fn options(&self, tolerance: f64) -> Result<CheckOptions, CliError> {
        let grid = match &self.grid {
            Some(g) => MisreportGrid::new(g.clone()).map_err(|e| CliError::Usage(e.to_string()))?,
            None => MisreportGrid::default(),
        };
        Ok(CheckOptions {
            grid,
            convention: self.convention.into(),
            resolution: self.resolution,
            budget: self.budget,
            tolerance: Tolerance { eps: tolerance },
            skip_truthfulness: self.no_truthfulness,
            skip_oracle: self.no_oracle,
        })
    }
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Report JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Trend CSV path; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Leave the property summary out of the report.
    #[arg(long)]
    pub no_checks: bool,
    #[command(flatten)]
    pub checks: CheckArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub checks: CheckArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub mechanism: MechanismKind,
    /// Directory for per-scenario files and `summary.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub checks: CheckArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub users: usize,
    #[arg(long, default_value_t = 1)]
    pub slots: usize,
    #[arg(long, default_value_t = 0.0)]
    pub demand_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub demand_max: f64,
    /// tight, loose, fixed:<kW> or flat:<factor>.
    #[arg(long, default_value = "tight")]
    pub policy: ProductionPolicy,
    #[arg(long, default_value = "case3")]
    pub mechanism: MechanismKind,
    #[arg(long, default_value_t = 1.0)]
    pub slot_duration: f64,
    #[arg(long, default_value_t = PenaltyParams::default().c)]
    pub c: f64,
    #[arg(long, default_value_t = PenaltyParams::default().k)]
    pub k: f64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("mechanism has no feasible outcome")]
    Infeasible,
    /// `output` is what the command would have printed on success.
    #[error("{count} property violation(s)")]
    PropertyViolation { count: usize, output: String },
    #[error("engine error: {0}")]
    Engine(EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Infeasible => CliError::Infeasible,
            EngineError::InvalidScenario(v) => CliError::Load(LoadError::Validation(v)),
            other => CliError::Engine(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(LoadError::Io { .. }) | CliError::Io(_) | CliError::Engine(_) => 1,
            CliError::Load(_) | CliError::Usage(_) => 2,
            CliError::Infeasible => 3,
            CliError::PropertyViolation { .. } => 4,
        }
    }
}

/// Runs one command, returning what it prints to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let eps = cli.tolerance;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(CliError::Usage(format!(
            "tolerance {eps} must be a finite non-negative number"
        )));
    }
    match &cli.command {
        Command::Allocate(a) => allocate(a, eps),
        Command::Verify(a) => verify(a, eps),
        Command::Sweep(a) => sweep(a, eps),
        Command::Oracle(a) => oracle(a, eps),
        Command::Generate(a) => generate(a),
    }
}

fn allocate(a: &AllocateArgs, eps: f64) -> Result<String, CliError> {
    let s = load_scenario(&a.scenario)?;
    let r = run_mechanism_with(&s, Tolerance { eps })?;
    let props = if a.no_checks {
        None
    } else {
        Some(check_outcome(&s, &r, &a.checks.options(eps)?)?)
    };
    let doc = build_report(&s, &r, props.as_ref());
    let csv = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    write_report(&doc, &a.out, Some(&csv))?;
    let mut out = String::new();
    for u in &doc.users {
        writeln!(out, "{} payment={} utility={}", u.id, u.payment, u.utility).unwrap();
    }
    writeln!(out, "welfare={}", doc.welfare).unwrap();
    Ok(out)
}

fn verify(a: &VerifyArgs, eps: f64) -> Result<String, CliError> {
    let s = load_scenario(&a.scenario)?;
    let r = run_mechanism_with(&s, Tolerance { eps })?;
    let props = check_outcome(&s, &r, &a.checks.options(eps)?)?;
    if let Some(out) = &a.out {
        write_report(&build_report(&s, &r, Some(&props)), out, None)?;
    }
    let mut text = String::new();
    for c in &props.checks {
        write!(text, "{:<24} {:<13}", c.property.as_str(), c.verdict.as_str()).unwrap();
        if let Some(m) = c.worst_margin {
            write!(text, " worst_margin={m}").unwrap();
        }
        if let Some(w) = c.witness {
            for (label, v) in [
                ("user", w.user.map(|u| s.users[u].id.clone())),
                ("slot", w.slot.map(|t| t.to_string())),
            ] {
                if let Some(v) = v {
                    write!(text, " {label}={v}").unwrap();
                }
            }
            if let Some(f) = w.factor {
                write!(text, " factor={f}").unwrap();
            }
        }
        if !c.note.is_empty() {
            write!(text, " ({})", c.note).unwrap();
        }
        text.push('\n');
    }
    let violations = props.violations().count();
    if violations > 0 {
        return Err(CliError::PropertyViolation {
            count: violations,
            output: text,
        });
    }
    Ok(text)
}

fn sweep(a: &SweepArgs, eps: f64) -> Result<String, CliError> {
    let cfg = SweepConfig {
        seed: a.seed,
        count: a.count,
        mechanism: a.mechanism,
        options: a.checks.options(eps)?,
    };
    let items = run_sweep(&cfg).map_err(|e| CliError::Engine(e.error))?;
    let summary = summarize(&cfg, &items);
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        for item in &items {
            let stem = format!("{}-seed{}", cfg.mechanism, item.seed);
            save_scenario(&item.scenario, &dir.join(format!("{stem}.scenario.json")))?;
            if let Some(r) = &item.result {
                let doc = build_report(&item.scenario, r, Some(&item.properties));
                write_report(&doc, &dir.join(format!("{stem}.report.json")), None)?;
            }
        }
        let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        text.push('\n');
        write_atomic(&dir.join("summary.json"), text.as_bytes())?;
    }
    let mut out = String::new();
    writeln!(
        out,
        "{} seeds {}..{} infeasible={}",
        summary.mechanism,
        cfg.seed,
        cfg.seed.wrapping_add(cfg.count as u64),
        summary.infeasible
    )
    .unwrap();
    for p in &summary.properties {
        write!(
            out,
            "{:<24} {} scenarios={} violations={} skipped={}",
            p.property,
            if p.asserted { "asserted" } else { "recorded" },
            p.scenarios,
            p.violations,
            p.skipped
        )
        .unwrap();
        if let (Some(m), Some(seed)) = (p.worst_margin, p.worst_seed) {
            write!(out, " worst_margin={m} seed={seed}").unwrap();
        }
        out.push('\n');
    }
    let violations = summary.total_violations();
    if violations > 0 {
        return Err(CliError::PropertyViolation {
            count: violations,
            output: out,
        });
    }
    Ok(out)
}

fn oracle(a: &OracleArgs, eps: f64) -> Result<String, CliError> {
    let s = load_scenario(&a.scenario)?;
    let r = run_mechanism_with(&s, Tolerance { eps })?;
    let b = brute_force_outcome(&s, a.resolution, a.budget).map_err(|e| match e {
        OracleError::NoFeasiblePoint => CliError::Infeasible,
        other => CliError::Usage(other.to_string()),
    })?;
    let opts = CheckOptions {
        resolution: a.resolution,
        budget: a.budget,
        tolerance: Tolerance { eps },
        skip_truthfulness: true,
        ..CheckOptions::default()
    };
    let check = check_outcome(&s, &r, &opts)?
        .checks
        .into_iter()
        .find(|c| c.property == dsm_vcg_core::oracle::Property::WelfareOracle)
        .expect("welfare check present");
    let out = format!(
        "engine_welfare={} oracle_welfare={} points={} verdict={}\n",
        r.welfare,
        b.welfare,
        b.points,
        check.verdict.as_str()
    );
    if check.verdict == Verdict::Violated {
        return Err(CliError::PropertyViolation { count: 1, output: out });
    }
    Ok(out)
}

fn generate(a: &GenerateArgs) -> Result<String, CliError> {
    let cfg = GenerateConfig {
        seed: a.seed,
        n_users: a.users,
        n_slots: a.slots,
        demand_range: (a.demand_min, a.demand_max),
        policy: a.policy,
        mechanism: a.mechanism,
        slot_duration: a.slot_duration,
        params: PenaltyParams { c: a.c, k: a.k },
    };
    let s: Scenario = generate_scenario(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let violations = dsm_vcg_core::validate_scenario(&s);
    if !violations.is_empty() {
        return Err(LoadError::Validation(violations).into());
    }
    match &a.out {
        Some(p) => {
            save_scenario(&s, p)?;
            Ok(String::new())
        }
        None => Ok(scenario_to_json(&s)),
    }
}
