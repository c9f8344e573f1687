use std::collections::HashMap;

use proptest::prelude::*;
use sphere_restriction::verifier::format::{machine, parse_machine};
use sphere_restriction::verifier::{
    parse_list, records_from_csv, run_sweep, verify_all, BoundId, BoundSweepReport, Calibration, GridSpec, Status,
    SweepContext,
};

fn small(id: BoundId) -> GridSpec {
    let mut g = GridSpec::default_for(id);
    match id {
        BoundId::StempakUpper | BoundId::StempakLower => {
            g.nu = vec![2.0, 8.0];
            g.p = vec![2.0, 4.0, 6.0];
            g.alpha_count = 3;
        }
        BoundId::Bessel1 | BoundId::Bessel2 | BoundId::Bessel3 => g.r_count = 20,
        _ => {}
    }
    g
}

#[test]
fn reports_round_trip_through_json_and_csv() {
    for id in [
        BoundId::StempakUpper,
        BoundId::Bessel2,
        BoundId::EllDLimit,
        BoundId::RadialBand,
    ] {
        let rep = run_sweep(id, &small(id), 1e-8, &SweepContext::new(None)).unwrap();
        let json = rep.to_json().unwrap();
        let back = BoundSweepReport::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json, "{id}");
        let csv = rep.to_csv();
        let (parsed_id, records) = records_from_csv(&csv).unwrap();
        assert_eq!(parsed_id, Some(id));
        assert_eq!(sphere_restriction::verifier::records_to_csv(id, &records), csv);
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let id = BoundId::StempakLower;
    let run = |threads| {
        sphere_restriction::verifier::with_parallelism(threads, || {
            run_sweep(id, &small(id), 1e-8, &SweepContext::new(None))
                .unwrap()
                .to_json()
                .unwrap()
        })
        .unwrap()
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn explicit_bounds_survive_grid_enlargement() {
    for id in [BoundId::Bessel2, BoundId::Bessel3, BoundId::KrasikovError] {
        let g = GridSpec::default_for(id);
        let ctx = SweepContext::new(None);
        assert!(run_sweep(id, &g, 1e-8, &ctx).unwrap().pass);
        assert!(run_sweep(id, &g.densify(), 1e-8, &ctx).unwrap().pass, "{id}");
    }
}

#[test]
fn frozen_ceiling_is_enforced() {
    let id = BoundId::Bessel4;
    let g = GridSpec::default_for(id);
    let rep = run_sweep(id, &g, 1e-8, &SweepContext::new(None)).unwrap();
    let mut cal = Calibration::from_reports(std::slice::from_ref(&rep));
    assert!(
        run_sweep(id, &g, 1e-8, &SweepContext::new(Some(cal.clone())))
            .unwrap()
            .pass
    );
    cal.bounds.get_mut(&id).unwrap().c_max = Some(rep.c_max.unwrap() * 0.9);
    let tampered = run_sweep(id, &g, 1e-8, &SweepContext::new(Some(cal))).unwrap();
    assert_eq!(tampered.status, Status::Fail);
}

#[test]
fn per_group_floors_for_lower_bounds() {
    let id = BoundId::StempakLower;
    let rep = run_sweep(id, &small(id), 1e-8, &SweepContext::new(None)).unwrap();
    assert_eq!(rep.groups.len(), 3);
    assert!(rep.groups.iter().all(|g| g.c_min > 0.0));
    let global = rep.c_min.unwrap();
    assert!(rep.groups.iter().any(|g| g.c_min == global));
}

#[test]
fn out_of_range_grids_are_rejected() {
    let ctx = SweepContext::new(None);
    let mut g = GridSpec::default_for(BoundId::StempakUpper);
    g.nu = vec![500.0];
    assert!(run_sweep(BoundId::StempakUpper, &g, 1e-8, &ctx).is_err());
    let mut g = GridSpec::default_for(BoundId::RadialBand);
    g.d = vec![800];
    assert!(run_sweep(BoundId::RadialBand, &g, 1e-8, &ctx).is_err());
    assert!(run_sweep(
        BoundId::EllDLimit,
        &GridSpec::default_for(BoundId::EllDLimit),
        0.5,
        &ctx
    )
    .is_err());
}

#[test]
fn verify_all_with_small_overrides() {
    let overrides: HashMap<BoundId, GridSpec> = BoundId::ALL.iter().map(|&id| (id, small(id))).collect();
    let (rep, cal) = verify_all(1e-8, None, &overrides).unwrap();
    assert!(rep.pass, "{:?}", rep.failing());
    let cal = cal.unwrap();
    assert!(cal.c_bullet.is_some() && cal.stein_tomas_c.is_some());
    let text = cal.to_json().unwrap();
    assert_eq!(Calibration::from_json(&text).unwrap(), cal);
    let (again, none) = verify_all(1e-8, Some(cal.clone()), &overrides).unwrap();
    assert!(again.pass && none.is_none());
    let (third, _) = verify_all(1e-8, Some(cal), &overrides).unwrap();
    assert_eq!(again.to_json().unwrap(), third.to_json().unwrap());
}

#[test]
fn malformed_calibration_is_a_config_error() {
    use sphere_restriction::Error;
    assert!(matches!(Calibration::from_json("{"), Err(Error::Config(_))));
    assert!(matches!(
        Calibration::from_json(r#"{"version": 99, "bounds": {}}"#),
        Err(Error::Config(_))
    ));
}

proptest! {
    #[test]
    fn machine_numbers_round_trip(x in proptest::num::f64::NORMAL) {
        let s = machine(x);
        let y = parse_machine(&s).unwrap();
        prop_assert_eq!(machine(y), s);
    }

    #[test]
    fn arithmetic_grids(a in 1u32..50, k in 1u32..10, n in 1u32..30) {
        let b = a + k * n;
        let v = parse_list(&format!("{a}:{b}:+{k}")).unwrap();
        prop_assert_eq!(v.len() as u32, n + 1);
        prop_assert_eq!(*v.last().unwrap(), b as f64);
    }

    #[test]
    fn geometric_grids(e in 0u32..6, n in 1u32..6) {
        let a = 2f64.powi(e as i32);
        let b = a * 2f64.powi(n as i32);
        let v = parse_list(&format!("{a}:{b}:x2")).unwrap();
        prop_assert_eq!(v.len() as u32, n + 1);
        for w in v.windows(2) {
            prop_assert_eq!(w[1], 2.0 * w[0]);
        }
    }
}
