use dsm_vcg::report::{build_report, ReportDocument};
use dsm_vcg::{load_scenario, save_scenario, scenario_to_json, write_report};
use dsm_vcg_core::oracle::{check_properties, CheckOptions};
use dsm_vcg_core::{run_mechanism, MechanismKind, PenaltyParams, PowerSeries, Scenario, UserProfile};
use proptest::prelude::*;

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    (1usize..4, 0usize..5, prop::sample::select(MechanismKind::ALL.to_vec())).prop_flat_map(|(slots, n, kind)| {
        let slots = if kind.single_slot_only() { 1 } else { slots };
        (
            prop::collection::vec(prop::collection::vec(0.0f64..1e6, slots), n),
            prop::collection::vec(0.0f64..1e6, slots),
            prop::sample::select(vec![0.25, 0.5, 1.0, 1.0 / 3.0]),
            0.01f64..=1.0,
            0.0f64..10.0,
        )
            .prop_map(move |(rows, production, dt, c, k)| {
                let users = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| UserProfile::new(format!("user-{i}"), PowerSeries::new(r, dt)))
                    .collect();
                Scenario::new(users, PowerSeries::new(production, dt), kind).with_params(PenaltyParams { c, k })
            })
    })
}

proptest! {
    #[test]
    fn scenario_file_round_trip_is_bit_exact(s in scenario_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_scenario(&s, &path).unwrap();
        let back = load_scenario(&path).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(scenario_to_json(&back), scenario_to_json(&s));
    }

    #[test]
    fn report_round_trip_and_trend_identity(s in scenario_strategy()) {
        prop_assume!(s.mechanism != MechanismKind::Case4);
        let r = run_mechanism(&s).unwrap();
        let doc = build_report(&s, &r, None);
        prop_assert_eq!(&ReportDocument::from_json(&doc.to_json()).unwrap(), &doc);
        for row in &doc.trends {
            prop_assert_eq!(row.production - row.agg_demand, row.headroom);
        }
        let csv = doc.trends_csv();
        prop_assert_eq!(csv.lines().count(), s.n_slots() + 1);
    }
}

#[test]
fn written_report_reloads_identically() {
    let s = Scenario::from_series(
        &[vec![3.0, 0.0], vec![3.0, 2.0]],
        vec![4.0, 4.0],
        1.0,
        MechanismKind::Case4,
    );
    let r = run_mechanism(&s).unwrap();
    let props = check_properties(&s, &CheckOptions::default()).unwrap();
    let doc = build_report(&s, &r, Some(&props));
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    write_report(&doc, &json, Some(&csv)).unwrap();
    let back = ReportDocument::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.scenario_digest, dsm_vcg::scenario_digest(&s));
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("t,production,agg_demand,agg_grant,headroom,grant_u1,grant_u2\n"));
}

#[test]
fn digest_tracks_content() {
    let a = Scenario::single_slot(&[1.0, 2.0], 3.0, MechanismKind::Case2);
    let b = Scenario::single_slot(&[1.0, 2.0], 3.0000000000000004, MechanismKind::Case2);
    assert_eq!(dsm_vcg::scenario_digest(&a), dsm_vcg::scenario_digest(&a.clone()));
    assert_ne!(dsm_vcg::scenario_digest(&a), dsm_vcg::scenario_digest(&b));
}
