use std::f64::consts::{FRAC_PI_2, PI};

use slcert_core::planar::*;
use slcert_core::quadrature::integrate;

fn hausdorff_to_parabola(curve: &PlanarCurve, k: f64) -> f64 {
    // Distance from each sample to y = kx², by Newton on the foot-point equation.
    curve
        .samples
        .iter()
        .map(|p| {
            let mut x = p.x;
            for _ in 0..30 {
                let g = (x - p.x) + 2.0 * k * x * (k * x * x - p.y);
                let dg = 1.0 + 2.0 * k * (3.0 * k * x * x - p.y);
                x -= g / dg;
            }
            ((x - p.x).powi(2) + (k * x * x - p.y).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn zero_curvature_is_a_segment() {
    let c = reconstruct(|_| 0.0, (0.0, 25.0), 0.1).unwrap();
    for p in &c.samples {
        assert!((p.x - p.s).abs() <= 1e-10 && p.y.abs() <= 1e-10);
    }
    assert!(self_intersects(&c).is_none());
}

#[test]
fn unit_curvature_closes_and_then_overlaps() {
    let c = reconstruct(|_| 1.0, (0.0, 2.0 * PI), 2.0 * PI / 1000.0).unwrap();
    let (a, b) = (c.samples.first().unwrap(), c.samples.last().unwrap());
    assert!(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() <= 1e-8);
    for p in &c.samples {
        let r = (p.x.powi(2) + (p.y - 1.0).powi(2)).sqrt();
        assert!((r - 1.0).abs() <= 1e-10);
    }
    let over = reconstruct(|_| 1.0, (0.0, 2.5 * PI), 0.01).unwrap();
    assert!(self_intersects(&over).is_some());
}

#[test]
fn parabola_reconstruction_matches_graph() {
    let c = reconstruct(|s| parabola_curvature(1.0, s), (0.0, 40.0), 0.05).unwrap();
    assert!(hausdorff_to_parabola(&c, 1.0) <= 1e-5);
    let both = reconstruct(|s| parabola_curvature(1.0, s), (-40.0, 40.0), 0.05).unwrap();
    assert!(hausdorff_to_parabola(&both, 1.0) <= 1e-5);
    assert!(self_intersects(&both).is_none());
}

#[test]
fn parabola_curvature_examples() {
    for k in [0.5, 1.0, 20.0] {
        assert_eq!(parabola_curvature(k, 0.0), 2.0 * k);
        let mut prev = f64::INFINITY;
        for j in 0..100 {
            let v = parabola_curvature(k, 0.37 * j as f64);
            assert!(v < prev);
            prev = v;
        }
        assert_eq!(parabola_curvature(k, -3.0), parabola_curvature(k, 3.0));
    }
}

#[test]
fn arclength_inverse_round_trips() {
    for k in [0.5, 1.0, 20.0] {
        for x in [0.0, 1e-3, 0.7, 12.0, 1e3] {
            let s = parabola_arclength(k, x);
            assert!((parabola_x_of_s(k, s) - x).abs() <= 1e-12 * x.max(1.0));
        }
    }
}

#[test]
fn parabola_turns_a_quarter() {
    let s_end = parabola_arclength(1.0, 1e3);
    let c = reconstruct(|s| parabola_curvature(1.0, s), (0.0, s_end), 0.5).unwrap();
    let turn = c.total_turn();
    assert!(turn >= FRAC_PI_2 - 1e-3, "{turn}");
    assert!(turn < FRAC_PI_2);
    // Tangent at the far end is within 1e-3 of vertical.
    assert!((c.samples.last().unwrap().theta - FRAC_PI_2).abs() < 1e-3);
    // Exact turn: atan of the slope 2kx.
    assert!((turn - (2e3f64).atan()).abs() < 1e-9);
}

#[test]
fn turning_identity_holds_for_every_family_member() {
    for t in [-0.3, 0.0, 0.3] {
        let kappa = kicked_parabola_curvature(20.0, t);
        let c = reconstruct(&kappa, (-30.0, 30.0), 0.01).unwrap();
        let mut quad = 0.0;
        for cut in [(-30.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 30.0)] {
            quad += integrate(&kappa, cut.0, cut.1, 1e-13).unwrap();
        }
        assert!((c.total_turn() - quad).abs() <= 1e-8, "t = {t}: {} vs {quad}", c.total_turn());
    }
}

#[test]
fn rigid_motion_equivariance() {
    let kappa = |s: f64| parabola_curvature(1.0, s) + 0.2 * (s * 0.3).sin();
    let base = reconstruct_with_frame(kappa, (-10.0, 10.0), 0.02, Frame::standard_at(0.0)).unwrap();
    for phi in [0.4, 2.0, -2.9] {
        let (x0, y0) = (1.5, -0.25);
        let rotated = reconstruct_with_frame(kappa, (-10.0, 10.0), 0.02, Frame { s: 0.0, x: x0, y: y0, theta: phi })
            .unwrap();
        for (p, q) in base.samples.iter().zip(&rotated.samples) {
            let (c, s) = (phi.cos(), phi.sin());
            let (x, y) = (x0 + c * p.x - s * p.y, y0 + s * p.x + c * p.y);
            assert!((q.x - x).abs() <= 1e-10 && (q.y - y).abs() <= 1e-10);
            assert!((q.theta - p.theta - phi).abs() <= 1e-12);
        }
    }
}

#[test]
fn unit_speed_discretization() {
    let c = reconstruct(|s| parabola_curvature(1.0, s), (-5.0, 5.0), 0.01).unwrap();
    for w in c.samples.windows(2) {
        let ds = w[1].s - w[0].s;
        let chord = ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
        let kappa = w[0].kappa.abs().max(w[1].kappa.abs());
        // A chord of an arc of length ds and curvature κ falls short by about κ²ds³/24.
        assert!(chord <= ds * (1.0 + 1e-14) && ds - chord <= kappa * kappa * ds.powi(3) / 24.0 * 1.01 + 1e-14);
    }
}

#[test]
fn vertex_of_the_parabola_family_is_embedded() {
    let e = kick_family_member(DEFAULT_PARABOLA_K, 0.0, DEFAULT_WINDOW, DEFAULT_STEP).unwrap();
    assert_eq!(e.verdict, Embedding::Embedded);
    let parabola_turn = 2.0 * (2.0 * DEFAULT_PARABOLA_K * parabola_x_of_s(DEFAULT_PARABOLA_K, DEFAULT_WINDOW)).atan();
    assert!((e.total_turn - parabola_turn).abs() < 1e-9);
}

#[test]
fn positive_kick_self_intersects() {
    let e = kick_family_member(DEFAULT_PARABOLA_K, 0.3, DEFAULT_WINDOW, DEFAULT_STEP).unwrap();
    assert_eq!(e.verdict, Embedding::SelfIntersecting);
    assert!(e.total_turn > PI);
    let (a, b) = e.first_intersection_s_pair.unwrap();
    assert!(a < 0.0 && b > 0.0);
    assert_eq!(e.appears_at_window, Some(a.abs().max(b.abs())));
}

#[test]
fn negative_kick_stays_embedded_on_growing_windows() {
    for window in [50.0, 100.0, 200.0] {
        let e = kick_family_member(DEFAULT_PARABOLA_K, -0.3, window, 0.02).unwrap();
        assert_eq!(e.verdict, Embedding::Embedded, "window {window}");
        assert!(e.total_turn < PI);
    }
}

#[test]
fn small_window_cannot_witness_the_crossing() {
    let r = kick_family_member(DEFAULT_PARABOLA_K, 0.01, 2.0, DEFAULT_STEP);
    assert!(matches!(r, Err(slcert_core::Error::WindowTooSmall { .. })), "{r:?}");
}

#[test]
fn sweep_crosses_once_near_zero() {
    let ts = parse_range("-0.3:0.3:0.05").unwrap();
    assert_eq!(ts.len(), 13);
    let rep = kick_family_transition(DEFAULT_PARABOLA_K, &ts, DEFAULT_WINDOW, DEFAULT_STEP).unwrap();
    assert_eq!(rep.crossings, 1);
    let (lo, hi) = rep.bracket.unwrap();
    assert!(lo >= -0.05 && hi <= 0.05, "{lo} {hi}");
    let first_bad = rep.entries.iter().position(|e| e.verdict != Embedding::Embedded).unwrap();
    assert!(rep.entries[first_bad..].iter().all(|e| e.verdict == Embedding::SelfIntersecting));
}

#[test]
fn parse_range_errors() {
    assert!(parse_range("1:2").is_err());
    assert!(parse_range("a:b:c").is_err());
    assert!(parse_range("0:1:0").is_err());
    assert_eq!(parse_range("0:0.2:0.1").unwrap(), vec![0.0, 0.1, 0.2]);
}

#[test]
fn reconstruction_rejects_bad_input() {
    assert!(reconstruct(|_| 0.0, (1.0, 0.0), 0.1).is_err());
    assert!(reconstruct(|_| 0.0, (0.0, 1.0), 0.0).is_err());
    assert!(reconstruct(|s| if s > 0.5 { f64::NAN } else { 0.0 }, (0.0, 1.0), 0.1).is_err());
}
