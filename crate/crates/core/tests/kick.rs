use std::f64::consts::{E, PI};

use proptest::prelude::*;
use slcert_core::catalog::{default_fk_kick, equality_profile};
use slcert_core::closed_form::{second_zero_closed_form, KickSpec};
use slcert_core::kick::*;
use slcert_core::sl_engine::find_second_zero;
use slcert_core::CurvatureProfile;

#[test]
fn threshold_solves_cot_x_equals_x() {
    let l = lambda_linear(1.0, E, E * E).unwrap();
    assert!((1.0 / l.tan() - l).abs() < 1e-10);
    // cot x = x, root by an independent Newton iteration.
    let mut x: f64 = 0.86;
    for _ in 0..50 {
        let f = x.cos() - x * x.sin();
        let df = -2.0 * x.sin() - x * x.cos();
        x -= f / df;
    }
    assert!((l - x).abs() < 1e-12, "{l} vs {x}");
    assert!((l - 0.860_333_589_019_379_7).abs() < 1e-12);
}

#[test]
fn threshold_at_base_point_is_quarter_period() {
    for (a, b) in [(2.0, 5.0), (1.0, 1e3)] {
        let want = PI / (2.0 * (b / a as f64).ln());
        assert!((lambda_linear(a, a, b).unwrap() - want).abs() <= 1e-15 * want);
    }
    for k in 1..=2u32 {
        let spec = KickSpec { r0: 20.0, a: 20.0, b: 400.0, mu: 0.0, k };
        let t = spec.phase(400.0).unwrap() - spec.phase(20.0).unwrap();
        assert!((lambda_log(k, 20.0, 20.0, 400.0).unwrap() - PI / (2.0 * t)).abs() < 1e-14);
    }
}

#[test]
fn threshold_decays_with_shell_length() {
    let mut prev = f64::INFINITY;
    for l in 1..=20 {
        let lam = lambda_linear(1.0, E, E.powi(l + 1)).unwrap();
        assert!(lam < prev, "l = {l}");
        prev = lam;
    }
    // Derived by the bisection oracle; frozen.
    assert!((prev - 0.0748).abs() < 5e-4, "{prev}");
}

#[test]
fn dense_scan_agrees_with_bisection_for_iterated_log() {
    let (r0, a, b) = (E, E * E, E.powi(3));
    let lam = lambda_log(1, r0, a, b).unwrap();
    let ll = |x: f64| x.ln().ln();
    let (t, d) = (ll(b) - ll(a), ll(a) - ll(r0));
    let g = |x: f64| (x * t).cos() - x * d * (x * t).sin();
    let mut x = 1e-6;
    let mut prev = g(x);
    let scanned = loop {
        let next = x + 1e-6;
        let v = g(next);
        if v.signum() != prev.signum() {
            break next;
        }
        prev = v;
        x = next;
        assert!(x < PI / (2.0 * t) + 1e-3);
    };
    assert!((scanned - lam).abs() <= 1e-6, "{scanned} vs {lam}");
    assert!(threshold_residual(1, r0, a, b, lam).unwrap() < 1e-10);
}

#[test]
fn threshold_monotone_on_grid() {
    let avals = [1.5, 2.0, 3.0, 4.5, 6.0];
    let bmul = [1.5, 2.0, 3.0, 5.0, 8.0];
    for &a in &avals {
        let mut prev = f64::INFINITY;
        for &m in &bmul {
            let lam = lambda_linear(1.0, a, 6.0 * m * 1.0).unwrap_or(f64::NAN);
            if 6.0 * m > a {
                assert!(lam <= prev, "b-monotonicity at a = {a}, b = {}", 6.0 * m);
                prev = lam;
            }
        }
    }
    for &b in &[10.0, 20.0, 40.0, 80.0, 160.0] {
        let mut prev = 0.0;
        for &a in &avals {
            let lam = lambda_linear(1.0, a, b).unwrap();
            assert!(lam >= prev, "a-monotonicity at a = {a}, b = {b}");
            prev = lam;
        }
    }
}

#[test]
fn log_threshold_reduces_to_linear() {
    for (r0, a, b) in [(1.0, E, E * E), (0.3, 2.0, 9.0), (5.0, 5.0, 6.0)] {
        assert_eq!(lambda_log(0, r0, a, b).unwrap(), lambda_linear(r0, a, b).unwrap());
    }
}

#[test]
fn threshold_rejects_bad_shells() {
    assert!(lambda_linear(1.0, 0.5, 2.0).is_err());
    assert!(lambda_linear(1.0, 2.0, 2.0).is_err());
    assert!(lambda_linear(0.0, 2.0, 3.0).is_err());
    assert!(lambda_log(1, 1.0, 2.0, 3.0).is_err());
    assert!(lambda_log(2, 2.0, 3.0, 10.0).is_err());
}

#[test]
fn case_two_diameter_with_kick_at_one() {
    let b = E;
    for mu in [1.6f64, 2.0, 2.5] {
        assert!(mu > lambda_linear(1.0, 1.0, b).unwrap());
        assert!(mu * b.ln() < PI);
        let want = 2.0 * b * (-(mu * b.ln()).tan() / mu).exp();
        let spec = KickSpec::linear(1.0, 1.0, b, mu);
        let got = diameter_bound(&spec).unwrap();
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
        let num = find_second_zero(&spec.profile(), 1.0, 1e11, 1e-11).unwrap();
        assert!((num.r1.unwrap() - want / 2.0).abs() <= 1e-6 * want, "mu = {mu}");
    }
}

#[test]
fn case_one_diameter() {
    let got = diameter_bound(&KickSpec::linear(1.0, 1.0, 1e6, 1.0)).unwrap();
    assert!((got - 2.0 * PI.exp()).abs() < 1e-9);
}

#[test]
fn certificate_for_kicked_profile() {
    let lam = lambda_linear(1.0, E, E * E).unwrap();
    let spec = KickSpec::linear(1.0, E, E * E, 1.1 * lam);
    let cert = certify(&spec.profile(), 2, &spec.with_mu(0.0), 1e6, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Compact);
    let r1 = cert.r1.unwrap();
    let exact = second_zero_closed_form(&spec).unwrap();
    assert!((r1 - exact).abs() <= 1e-6 * exact);
    assert_eq!(cert.diameter_bound, Some(2.0 * r1));
    assert_eq!(cert.discrepancy_notes.len(), 1);

    let tight = certify(&spec.profile(), 2, &spec, 1e6, &CertifyOptions { tol: 1e-11, ..Default::default() }).unwrap();
    assert!((tight.r1.unwrap() - r1).abs() <= 1e-5 * r1);

    let all = certify(&spec.profile(), 2, &spec, 1e6, &CertifyOptions { all_origins: true, ..Default::default() })
        .unwrap();
    assert_eq!(all.diameter_bound, Some(all.r1.unwrap()));
}

#[test]
fn equality_profile_is_inconclusive() {
    let cert = certify(&equality_profile(0), 2, &KickSpec::linear(1.0, E, E * E, 0.0), 1e6, &CertifyOptions::default())
        .unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(cert.r1.is_none() && cert.diameter_bound.is_none());
    assert!(cert.reason.unwrap().contains("does not exceed"));
}

#[test]
fn below_critical_decay_names_the_radius() {
    let p = CurvatureProfile::new("half", 0.0, |r| 0.1 / (r * r));
    let cert = certify(&p, 3, &KickSpec::linear(1.0, E, E * E, 0.0), 1e4, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert!(cert.reason.unwrap().contains("at r = 1"));
}

#[test]
fn log_kick_certificate() {
    let spec = default_fk_kick();
    let cert = certify(&spec.profile(), 2, &spec, 1e6, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Compact);
    let exact = second_zero_closed_form(&spec).unwrap();
    assert!((cert.r1.unwrap() - exact).abs() <= 1e-6 * exact);
    let tight = certify(&spec.profile(), 2, &spec, 1e6, &CertifyOptions { tol: 1e-11, ..Default::default() }).unwrap();
    assert!((tight.r1.unwrap() - cert.r1.unwrap()).abs() <= 1e-5 * exact);
}

#[test]
fn certify_rejects_bad_inputs() {
    let spec = KickSpec::linear(1.0, E, E * E, 1.0);
    assert!(certify(&spec.profile(), 1, &spec, 1e4, &CertifyOptions::default()).is_err());
    assert!(certify(&spec.profile(), 2, &spec, 5.0, &CertifyOptions::default()).is_err());
    let short = spec.profile().with_domain_end(100.0);
    assert!(certify(&short, 2, &spec, 1e4, &CertifyOptions::default()).is_err());
}

#[test]
fn log_grid_endpoints_are_exact() {
    let g = log_grid(1.0, 1e6, 7);
    assert_eq!(g.len(), 7);
    assert_eq!((g[0], g[6]), (1.0, 1e6));
    assert!((g[3] - 1e3).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn threshold_is_scale_invariant(r0 in 0.1f64..5.0, fa in 1.0f64..4.0, fb in 1.1f64..6.0, c in 0.01f64..100.0) {
        let (a, b) = (r0 * fa, r0 * fa * fb);
        let l1 = lambda_linear(r0, a, b).unwrap();
        let l2 = lambda_linear(c * r0, c * a, c * b).unwrap();
        prop_assert!((l1 - l2).abs() <= 1e-12 * l1, "{} vs {}", l1, l2);
    }

    #[test]
    fn threshold_root_is_bracketed(fa in 1.0f64..6.0, fb in 1.05f64..8.0, k in 0u32..2) {
        let r0 = if k == 0 { 1.0 } else { 3.0 };
        let (a, b) = (r0 * fa, r0 * fa * fb);
        let lam = lambda_log(k, r0, a, b).unwrap();
        let spec = KickSpec { r0, a, b, mu: 0.0, k };
        let t = spec.phase(b).unwrap() - spec.phase(a).unwrap();
        prop_assert!(lam > 0.0 && lam <= PI / (2.0 * t) * (1.0 + 1e-15));
        prop_assert!(threshold_residual(k, r0, a, b, lam).unwrap() <= 1e-10);
    }

    #[test]
    fn closed_form_second_zero_matches_integrator(fa in 1.5f64..5.0, fb in 1.5f64..5.0, m in 1.05f64..3.0) {
        let (a, b) = (fa, fa * fb);
        let lam = lambda_linear(1.0, a, b).unwrap();
        let spec = KickSpec::linear(1.0, a, b, m * lam);
        let exact = second_zero_closed_form(&spec).unwrap();
        prop_assume!(exact < 1e12);
        let num = find_second_zero(&spec.profile(), 1.0, 2.0 * exact, 1e-11).unwrap();
        let r1 = num.r1.unwrap();
        prop_assert!((r1 - exact).abs() <= 1e-7 * exact, "{} vs {}", r1, exact);
    }
}
