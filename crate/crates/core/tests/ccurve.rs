mod common;

use common::*;
use contact_weakkam::ccurve::*;
use contact_weakkam::model::{ContactHamiltonian, LagrangianView, TorusGrid1D, VelocityGrid};
use contact_weakkam::weakkam::{admissible_interval_probe, Discretization, SolveOptions};

fn settings(method: Method) -> ScanSettings {
    ScanSettings {
        method,
        lp_grid: grid(64),
        lp_vgrid: VelocityGrid::new(2.0, 33).unwrap(),
        lo_disc: Discretization::matched(grid(128), VelocityGrid::new(4.0, 33).unwrap()),
        lo_iters: 2000,
        eps_ordinal: 1e-3,
        tol_face: 1e-6,
        gap_tol: 2e-2,
    }
}

fn probe(h: &ContactHamiltonian) -> contact_weakkam::weakkam::ProbeReport {
    let d = Discretization::matched(TorusGrid1D::new(1.0, 128).unwrap(), VelocityGrid::new(4.0, 33).unwrap());
    admissible_interval_probe(h, -1.0, 1.0, 10, d, &SolveOptions::default()).unwrap()
}

#[test]
fn pendulum_curve() {
    let h = ContactHamiltonian::pendulum_example();
    let samples = scan(&h, -1.0, 2.0, 31, &settings(Method::Both)).unwrap();
    for s in &samples {
        assert!(s.is_ok());
        let exact = (2.0 * (s.theta - 1.0)).max(0.0);
        assert!((s.c - exact).abs() <= 1e-2, "theta {}", s.theta);
        assert!((s.c - pendulum_c_oracle(s.theta, 64)).abs() <= 1e-9);
        assert!(!s.gap_flagged);
        let alpha_at_rest = if s.theta < 1.0 - 1e-9 {
            0.0
        } else if s.theta > 1.0 + 1e-9 {
            2.0
        } else {
            continue;
        };
        assert!((s.integral_duh - alpha_at_rest).abs() <= 1e-9);
    }
    let view = LagrangianView::new(&h, 2.0, 33);
    let report = verify_h4(&samples, &view, &H4Tolerances::default());
    assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
    let item4 = report.at(4, samples[25].theta).unwrap();
    assert_eq!(item4.verdict, Verdict::Pass);
    let item2 = report.at(2, samples[10].theta).unwrap();
    assert_eq!(item2.verdict, Verdict::Pass);
    for item in 1..=8 {
        assert!(report.tally(item).0 > 0, "item {item} never applied");
    }

    let shape = classify_admissible_set(&samples, Some(&probe(&h)));
    assert_eq!(shape.shape, Shape::ClosedRay(0.0));
    assert!(shape.convex(1e-3) && shape.monotone(1e-9));
    assert!(shape.ordinal_above_min <= 2e-2);
}

#[test]
fn strictly_increasing_hamiltonian() {
    let h = ContactHamiltonian::discounted_free();
    let samples = scan(&h, -1.0, 2.0, 16, &settings(Method::Lp)).unwrap();
    for s in &samples {
        assert!((s.c - s.theta).abs() <= 1e-9);
        assert!(!s.ordinal_nonempty && s.robustly_non_ordinal);
        for slope in [s.slope_left, s.slope_right].into_iter().flatten() {
            assert!((slope - 1.0).abs() <= 1e-9);
        }
    }
    let view = LagrangianView::new(&h, 2.0, 33);
    let report = verify_h4(&samples, &view, &H4Tolerances::default());
    assert!(report.all_passed());
    assert!(report.tally(3).0 >= 14 && report.tally(4).0 >= 14);
    let shape = classify_admissible_set(&samples, Some(&probe(&h)));
    assert_eq!(shape.shape, Shape::Line);
}

#[test]
fn u_independent_hamiltonian_is_a_point() {
    let h = ContactHamiltonian::free_particle();
    let samples = scan(&h, -1.0, 2.0, 11, &settings(Method::LaxOleinik)).unwrap();
    assert!(samples.iter().all(|s| s.c.abs() <= 1e-9));
    let shape = classify_admissible_set(&samples, Some(&probe(&h)));
    assert_eq!(shape.shape, Shape::Point(0.0));
}

#[test]
fn scan_preconditions() {
    let h = ContactHamiltonian::free_particle();
    assert!(scan(&h, 1.0, 0.0, 10, &settings(Method::Lp)).is_err());
    assert!(scan(&h, 0.0, 1.0, 4, &settings(Method::Lp)).is_err());
    assert!("simplex".parse::<Method>().is_err());
    assert_eq!("both".parse::<Method>().unwrap(), Method::Both);
}

#[test]
fn failed_samples_are_flagged_not_fatal() {
    // Period mismatch between Hamiltonian and LP grid: every sample fails.
    let h = ContactHamiltonian::piecewise_example();
    let samples = scan(&h, 0.0, 1.0, 5, &settings(Method::Lp)).unwrap();
    assert!(samples.iter().all(|s| !s.is_ok() && s.c.is_nan()));
}
