use std::f64::consts::{FRAC_PI_2, PI};

use slcert_core::bifurcator::*;
use slcert_core::catalog::{arctan_bifurcator, arctan_with_bump};
use slcert_core::sl_engine::{bump_on, integrate_sl};
use slcert_core::surfaces::{CurvatureMode, RevolutionSurface};
use slcert_core::{CurvatureProfile, Error};

fn opts() -> ClassifyOptions {
    ClassifyOptions::default()
}

#[test]
fn arctan_profile_is_a_bifurcator() {
    let rep = classify(&arctan_bifurcator(), DEFAULT_R_MAX, &opts()).unwrap();
    assert_eq!(rep.classification, Classification::Bifurcator);
    assert!(rep.tail <= rep.tail_tol);
    assert!((rep.w_limit.unwrap() - FRAC_PI_2).abs() < 1e-4);
    assert!((rep.w_at_rmax - 1e4f64.atan()).abs() < 1e-7);
    assert!((rep.wp_at_rmax * (1.0 + 1e8) - 1.0).abs() < 1e-3, "{:e}", rep.wp_at_rmax);
}

#[test]
fn verdict_survives_tighter_tolerance_and_longer_range() {
    let b = arctan_bifurcator();
    let tight = ClassifyOptions { tol: 1e-11, ..opts() };
    let rep = classify(&b, 2.0 * DEFAULT_R_MAX, &tight).unwrap();
    assert_eq!(rep.classification, Classification::Bifurcator);
}

#[test]
fn constant_profile_returns_at_pi() {
    let rep = classify(&CurvatureProfile::constant(1.0), 100.0, &opts()).unwrap();
    match rep.classification {
        Classification::NotBifurcator(NotBifurcatorReason::SecondZero { r }) => assert!((r - PI).abs() < 1e-8),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flat_profile_is_unbounded() {
    let rep = classify(&CurvatureProfile::constant(0.0), 1e4, &opts()).unwrap();
    assert!(matches!(rep.classification, Classification::NotBifurcator(NotBifurcatorReason::Unbounded { .. })));
}

#[test]
fn slow_growth_is_inconclusive() {
    // w = √r-like growth below the cap: neither bounded nor above the cap.
    let p = CurvatureProfile::new("1/(4r^2)", 1.0, |r| 0.25 / (r * r));
    let rep = classify(&p, 1e4, &opts()).unwrap();
    assert!(matches!(rep.classification, Classification::Inconclusive { .. }), "{:?}", rep.classification);
}

#[test]
fn abresch_conditions_for_arctan() {
    let a = abresch_checks(&arctan_bifurcator(), 1e4, &opts()).unwrap();
    assert!(a.moment.converged && a.moment.quadrature_converged);
    assert!(a.moment.tail_ratio < 0.5 + 1e-3, "{}", a.moment.tail_ratio);
    assert!((a.wp_loglog_slope + 2.0).abs() < 0.01, "{}", a.wp_loglog_slope);
    assert!(a.independent.diverges);
    assert!(a.independent.v_at_rmax.abs() > 1e3);
    assert!(a.independent.wronskian_drift <= 1e-6);
    // Derived by the quadrature oracle; frozen.
    assert!((a.moment.value - 1.648_150_310_7).abs() < 1e-6, "{}", a.moment.value);
}

#[test]
fn moment_integral_of_compact_support() {
    let p = CurvatureProfile::new("bump", 0.0, bump_on(1.0, 3.0, 1.0)).with_breakpoints(vec![1.0, 3.0]);
    let m = moment_integral(&p, 0.0, 1e3);
    assert!(m.quadrature_converged);
    // ∫ r β(r) dr = 2·∫ β for a bump symmetric about r = 2; ∫ exp(-1/(1-x²)) = 0.4439938161680794.
    let want = 2.0 * std::f64::consts::E * 0.443_993_816_168_079_4;
    assert!((m.value - want).abs() < 1e-9, "{} vs {want}", m.value);
}

#[test]
fn boundary_test_examples() {
    let b = arctan_bifurcator();
    let c = arctan_with_bump(0.2, 1.0, 2.0);
    let rep = boundary_test(&b, &c, 1e4, 2000, &opts()).unwrap();
    assert!(matches!(rep.verdict, BoundaryVerdict::CompactSide { .. }));
    assert!(rep.max_excess > 0.0);

    let same = boundary_test(&b, &b, 1e4, 2000, &opts()).unwrap();
    assert!(matches!(same.verdict, BoundaryVerdict::NoEvidence { .. }));

    let half = b.scaled(0.5);
    assert!(matches!(boundary_test(&b, &half, 1e4, 2000, &opts()), Err(Error::ExceedanceViolated { .. })));
}

#[test]
fn small_margins_reach_compact_side_by_ten_thousand() {
    let b = arctan_bifurcator();
    for h in [0.05, 0.1, 0.2] {
        let rep = boundary_test(&b, &arctan_with_bump(h, 1.0, 2.0), 1e4, 2000, &opts()).unwrap();
        match rep.verdict {
            BoundaryVerdict::CompactSide { r1 } => assert!(r1 < 1e4),
            other => panic!("h = {h}: {other:?}"),
        }
    }
}

#[test]
fn noncompact_side_examples() {
    let b = arctan_bifurcator();
    let same = noncompact_side_check(&b, &b, 1e4, 2000).unwrap();
    assert_eq!(same.verdict, SideVerdict::NoncompactSide);
    let twice = noncompact_side_check(&b.scaled(2.0), &b, 1e4, 2000).unwrap();
    assert_eq!(twice.verdict, SideVerdict::NotApplicable);
    assert!(twice.first_violation.is_some());

    let mut prev = f64::INFINITY;
    for r_max in [1e2, 1e3, 1e4, 1e5] {
        let d = noncompact_side_check(&b, &b, r_max, 500).unwrap().liminf_diagnostic;
        assert!(d < prev);
        // b ~ (4/π)/r³ for large r.
        assert!((d * r_max.powi(3) / (4.0 / PI) - 1.0).abs() < 0.05, "{r_max}: {d}");
        prev = d;
    }
}

// ---------------------------------------------------------------- surfaces

#[test]
fn flat_disk_radius_is_rho() {
    let s = RevolutionSurface::flat_disk();
    for rho in [0.0, 0.3, 7.0, 1e3] {
        assert!((s.geodesic_radius(rho).unwrap() - rho).abs() <= 1e-12 * rho.max(1.0));
    }
}

#[test]
fn capped_cylinder_radius_tracks_height() {
    let s = RevolutionSurface::capped_cylinder();
    let rho = 0.999;
    let ratio = s.geodesic_radius(rho).unwrap() / s.height(rho).unwrap()[0];
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn paraboloid_radius_is_quadratic() {
    let s = RevolutionSurface::paraboloid(1.0);
    let mut prev = f64::INFINITY;
    for rho in [10.0, 100.0, 1000.0] {
        let q = s.geodesic_radius(rho).unwrap() / (rho * rho);
        assert!(q < prev && q > 1.0);
        prev = q;
    }
    assert!((prev - 1.0).abs() < 1e-5);
}

#[test]
fn geodesic_radius_grows_at_least_like_rho() {
    for s in [RevolutionSurface::capped_cylinder(), RevolutionSurface::paraboloid(1.0)] {
        let top = if s.rho_max().is_finite() { 0.99 * s.rho_max() } else { 50.0 };
        let mut prev = (0.0, s.geodesic_radius(0.0).unwrap());
        for j in 1..=400 {
            let rho = top * j as f64 / 400.0;
            let r = s.geodesic_radius(rho).unwrap();
            assert!(r - prev.1 >= (rho - prev.0) * (1.0 - 1e-12), "{} at {rho}", s.label());
            prev = (rho, r);
        }
    }
}

#[test]
fn inversion_round_trips() {
    for s in [RevolutionSurface::capped_cylinder(), RevolutionSurface::paraboloid(1.0)] {
        for r in [0.01, 0.5, 3.0, 100.0, 5e4] {
            let rho = s.rho_of_r(r).unwrap();
            assert!((s.geodesic_radius(rho).unwrap() - r).abs() <= 1e-10 * r, "{} r = {r}", s.label());
        }
    }
}

#[test]
fn exact_curvature_positive_where_z_prime_z_second_positive() {
    for s in [RevolutionSurface::capped_cylinder(), RevolutionSurface::paraboloid(1.0)] {
        for j in 1..200 {
            let rho = if s.rho_max().is_finite() { j as f64 / 200.0 } else { j as f64 };
            let [_, zp, zpp] = s.height(rho).unwrap();
            if zp * zpp > 0.0 {
                assert!(s.gauss_curvature(rho, CurvatureMode::Exact).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn capped_cylinder_decay_constant() {
    let s = RevolutionSurface::capped_cylinder();
    let kr3 = |r: f64| s.curvature_at_r(r).unwrap() * r.powi(3);
    // Derived by the inversion oracle; frozen. The approach to 2 is slow: O(1/r).
    assert!((kr3(100.0) - 1.9686).abs() < 1e-3, "{}", kr3(100.0));
    assert!((kr3(1000.0) - 2.0).abs() < 0.005, "{}", kr3(1000.0));
    assert!((kr3(1e5) - 2.0).abs() < 1e-4, "{}", kr3(1e5));
    let mut prev = 0.0;
    for r in [100.0, 200.0, 500.0, 1000.0, 1e4] {
        assert!(kr3(r) > prev);
        prev = kr3(r);
    }
}

#[test]
fn printed_mode_differs_from_exact_near_axis_only() {
    let s = RevolutionSurface::capped_cylinder();
    for rho in [0.99, 0.999] {
        let e = s.gauss_curvature(rho, CurvatureMode::Exact).unwrap();
        let p = s.gauss_curvature(rho, CurvatureMode::Printed).unwrap();
        assert!(((p - e) / e).abs() < 0.02, "{rho}");
    }
    let e = s.gauss_curvature(0.2, CurvatureMode::Exact).unwrap();
    let p = s.gauss_curvature(0.2, CurvatureMode::Printed).unwrap();
    assert!(((p - e) / e).abs() > 0.1);
    assert!(s.gauss_curvature(0.0, CurvatureMode::Exact).is_err());
}

#[test]
fn pole_curvature_is_the_cap_sphere() {
    let s = RevolutionSurface::capped_cylinder();
    let k0 = s.gauss_curvature_or_axis(0.0).unwrap();
    let k_near = s.gauss_curvature(1e-4, CurvatureMode::Exact).unwrap();
    assert!((k0 - k_near).abs() <= 1e-6 * k0);
}

#[test]
fn paraboloid_saturates_quarter() {
    let s = RevolutionSurface::paraboloid(1.0);
    for r in [1e3, 1e4, 1e5] {
        let v = s.curvature_at_r(r).unwrap() * r * r;
        assert!((v - 0.25).abs() < 1e-2, "r = {r}: {v}");
    }
    let p = s.curvature_profile().unwrap();
    let side = noncompact_side_check(&p, &p, 1e5, 200).unwrap();
    assert!(side.liminf_diagnostic * 1e5 * 1e5 / 4.0 <= 0.25 + 1e-3);
}

#[test]
fn jacobi_field_is_the_parallel_radius() {
    for s in [RevolutionSurface::capped_cylinder(), RevolutionSurface::paraboloid(1.0)] {
        let p = s.curvature_profile().unwrap();
        let t = integrate_sl(&p, 0.0, 0.0, 1.0, 1e3, 1e-10).unwrap();
        for r in [0.5, 5.0, 50.0, 500.0, 1e3] {
            let rho = s.rho_of_r(r).unwrap();
            let w = t.w(r).unwrap();
            assert!(((w - rho) / rho).abs() <= 1e-3, "{} r = {r}: {w} vs {rho}", s.label());
        }
    }
}

#[test]
fn capped_cylinder_profile_is_a_bifurcator() {
    let p = RevolutionSurface::capped_cylinder().curvature_profile().unwrap();
    let rep = classify(&p, 1e4, &opts()).unwrap();
    assert_eq!(rep.classification, Classification::Bifurcator, "{rep:?}");
    let t = integrate_sl(&p, 0.0, 0.0, 1.0, 1e3, 1e-10).unwrap();
    let (w1000, w500) = (t.w(1e3).unwrap(), t.w(500.0).unwrap());
    assert!(w1000 - w500 <= 1e-3 * w1000, "{}", (w1000 - w500) / w1000);
}

#[test]
fn tabulated_profile_tracks_exact_inversion() {
    let s = RevolutionSurface::capped_cylinder();
    let grid: Vec<f64> = (0..=400).map(|i| 1e-3 * (1e7f64).powf(i as f64 / 400.0)).collect();
    let tab = s.curvature_profile_tabulated(&grid).unwrap();
    for r in [0.01, 0.3, 2.0, 40.0, 700.0] {
        let exact = s.curvature_at_r(r).unwrap();
        assert!(((tab.eval(r) - exact) / exact).abs() < 1e-3, "r = {r}");
    }
    assert!(tab.eval(1e-4).is_nan());
}

#[test]
fn table_rows_have_consistent_columns() {
    let s = RevolutionSurface::paraboloid(1.0);
    let rows = s.table_rows(&[10.0, 100.0]).unwrap();
    for row in &rows {
        assert!((row.k_r2 - row.k_exact * row.r * row.r).abs() <= 1e-15 * row.k_r2);
        assert!((row.z - row.rho * row.rho).abs() <= 1e-12 * row.z);
    }
    assert!(s.table_rows(&[0.0]).is_err());
}

#[test]
fn cone_point_has_no_smooth_profile() {
    assert!(RevolutionSurface::cone(1.0, 0.0).curvature_profile().is_err());
    assert!(RevolutionSurface::uncapped_cylinder().curvature_profile().is_err());
}
