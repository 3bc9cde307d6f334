use std::path::Path;
use std::process::{Command, Output};

fn dsm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsm-vcg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

const CASE3: &str = r#"{"slot_duration_h": 1.0, "production": [4.0],
    "users": [{"id": "a", "demand": [2.0]}, {"id": "b", "demand": [6.0]}], "mechanism": "case3"}"#;

#[test]
fn allocate_writes_report_and_trends() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", CASE3);
    let out = dsm(dir.path(), &["allocate", "--scenario", "s.json", "--out", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    let payments: Vec<f64> = report["users"]
        .as_array()
        .unwrap()
        .iter()
        .map(|u| u["payment"].as_f64().unwrap())
        .collect();
    assert_eq!(payments, vec![1.0, 1.0]);
    assert_eq!(report["properties"]["all_asserted_hold"], true);

    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(
        csv,
        "t,production,agg_demand,agg_grant,headroom,grant_a,grant_b\n0,4.0,8.0,4.0,-4.0,1.0,3.0\n"
    );
}

#[test]
fn missing_field_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.json",
        r#"{"slot_duration_h": 1.0, "users": [], "mechanism": "case1"}"#,
    );
    let out = dsm(dir.path(), &["verify", "--scenario", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("production"));
}

#[test]
fn negative_demand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", &CASE3.replace("[6.0]", "[-1.0]"));
    let out = dsm(dir.path(), &["allocate", "--scenario", "s.json", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NegativePower"));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn multi_slot_single_slot_mechanism_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let body = CASE3
        .replace("[4.0]", "[4.0, 4.0]")
        .replace("[2.0]", "[2.0, 1.0]")
        .replace("[6.0]", "[6.0, 1.0]");
    write(dir.path(), "s.json", &body);
    assert_eq!(
        dsm(dir.path(), &["verify", "--scenario", "s.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn unmet_floor_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.json",
        r#"{"slot_duration_h": 1.0, "production": [5.0, 5.0],
            "users": [{"id": "a", "demand": [6.0, 6.0]}], "mechanism": "case4"}"#,
    );
    for verb in ["allocate", "verify", "oracle"] {
        let mut args = vec![verb, "--scenario", "s.json"];
        if verb == "allocate" {
            args.extend(["--out", "r.json"]);
        }
        assert_eq!(dsm(dir.path(), &args).status.code(), Some(3), "{verb}");
    }
}

#[test]
fn verify_lists_checks() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", CASE3);
    let out = dsm(dir.path(), &["verify", "--scenario", "s.json", "--grid", "0,0.5,1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "capacity",
        "no_positive_transfer",
        "individual_rationality",
        "truthfulness",
        "utilization",
        "welfare_oracle",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(name) && l.contains("holds")),
            "{name}\n{text}"
        );
    }
}

#[test]
fn verify_rejects_grid_without_truth() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", CASE3);
    assert_eq!(
        dsm(dir.path(), &["verify", "--scenario", "s.json", "--grid", "0,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn case1_pivotal_underreport_depends_on_convention() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.json",
        r#"{"slot_duration_h": 1.0, "production": [10.0],
            "users": [{"id": "a", "demand": [6.0]}, {"id": "b", "demand": [5.0]}], "mechanism": "case1"}"#,
    );
    let exp = dsm(dir.path(), &["verify", "--scenario", "s.json"]);
    assert!(exp.status.success());
    let exp = String::from_utf8(exp.stdout).unwrap();
    assert!(
        exp.lines()
            .any(|l| l.starts_with("truthfulness") && l.contains("recorded_only") && l.contains("factor=0")),
        "{exp}"
    );
    assert!(
        exp.lines()
            .any(|l| l.starts_with("individual_rationality") && l.contains("worst_margin=-5")),
        "{exp}"
    );

    let model = dsm(dir.path(), &["verify", "--scenario", "s.json", "--convention", "model"]);
    assert!(model.status.success());
    let model = String::from_utf8(model.stdout).unwrap();
    assert!(
        model
            .lines()
            .any(|l| l.starts_with("truthfulness") && l.contains("holds")),
        "{model}"
    );
}

#[test]
fn oracle_reports_both_welfares() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.json",
        r#"{"slot_duration_h": 1.0, "production": [4.0, 4.0],
            "users": [{"id": "u1", "demand": [3.0, 0.0]}, {"id": "u2", "demand": [3.0, 2.0]}], "mechanism": "case4"}"#,
    );
    let out = dsm(dir.path(), &["oracle", "--scenario", "s.json", "--resolution", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("engine_welfare=6 oracle_welfare=6 points=6561 verdict=holds"),
        "{text}"
    );
}

#[test]
fn generate_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate",
        "--seed",
        "42",
        "--users",
        "3",
        "--slots",
        "2",
        "--policy",
        "loose",
        "--mechanism",
        "case5",
    ];
    let a = dsm(dir.path(), &args);
    let b = dsm(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = dsm_vcg::parse_scenario(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!((s.n_users(), s.n_slots()), (3, 2));
    assert!(dsm_vcg_core::headroom(&s).iter().all(|h| *h >= 0.0));
}

#[test]
fn sweep_writes_summary_in_seed_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dsm(
        dir.path(),
        &[
            "sweep",
            "--seed",
            "3",
            "--count",
            "5",
            "--mechanism",
            "case3",
            "--out-dir",
            "o",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["count"], 5);
    assert_eq!(summary["first_seed"], 3);
    for seed in 3..8 {
        assert!(dir.path().join(format!("o/case3-seed{seed}.scenario.json")).exists());
        assert!(dir.path().join(format!("o/case3-seed{seed}.report.json")).exists());
    }
}

#[test]
fn bad_tolerance_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", CASE3);
    let out = dsm(dir.path(), &["--tolerance", "-1", "verify", "--scenario", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
}
