//! Sturm–Liouville integration with zero/extremum detection, the index form,
//! and the Picone comparison identity.

pub mod dop853;
mod profile;
mod trajectory;

use serde::Serialize;

pub use profile::{bump_on, mollifier, CurvatureProfile};
pub use trajectory::{SLTrajectory, TrajectorySummary};

use crate::error::{Error, Result};
use crate::quadrature::gl10;

pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-3;

const INTERNAL_TOL_FACTOR: f64 = 0.1;

/// Offset used when a profile cannot be evaluated at the origin.
pub const DEFAULT_EPS: f64 = 1e-6;

fn check_tol(tol: f64) -> Result<()> {
    if (MIN_TOL..=MAX_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tol = {tol} outside [{MIN_TOL}, {MAX_TOL}]")))
    }
}

/// Solve `w'' + b(r) w = 0` with `w(r_start) = w0`, `w'(r_start) = w0p` on `[r_start, r_end]`.
pub fn integrate_sl(
    profile: &CurvatureProfile,
    r_start: f64,
    w0: f64,
    w0p: f64,
    r_end: f64,
    tol: f64,
) -> Result<SLTrajectory> {
    integrate_inner(profile, r_start, [w0, w0p], r_end, tol, false)
}

/// Like [`integrate_sl`] but stops after the step containing the first zero past `r_start`.
pub fn integrate_to_first_zero(
    profile: &CurvatureProfile,
    r_start: f64,
    w0: f64,
    w0p: f64,
    r_end: f64,
    tol: f64,
) -> Result<SLTrajectory> {
    integrate_inner(profile, r_start, [w0, w0p], r_end, tol, true)
}

fn integrate_inner(
    profile: &CurvatureProfile,
    r_start: f64,
    y0: [f64; 2],
    r_end: f64,
    tol: f64,
    stop_at_zero: bool,
) -> Result<SLTrajectory> {
    check_tol(tol)?;
    if !(r_start < r_end) || !r_start.is_finite() || !r_end.is_finite() {
        return Err(Error::InvalidInput(format!("need r_start < r_end, got [{r_start}, {r_end}]")));
    }
    if !profile.covers(r_start, r_end) {
        return Err(Error::DomainMismatch {
            label: profile.label().to_string(),
            lo: r_start,
            hi: r_end,
        });
    }
    // The dense derivative is about one order less accurate than the step values.
    let opts = dop853::Options::with_tol(tol * INTERNAL_TOL_FACTOR);
    let mut cuts = vec![r_start];
    cuts.extend(profile.breakpoints_in(r_start, r_end));
    cuts.push(r_end);

    let mut steps: Vec<dop853::DenseStep<2>> = Vec::new();
    let mut y = y0;
    let mut h0 = None;
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        // One-sided coefficient values at breakpoints.
        let lo_eff = if lo > r_start { lo.next_up() } else { lo };
        let hi_eff = if hi < r_end { hi.next_down() } else { hi };
        let rhs = |r: f64, s: &[f64; 2]| [s[1], -profile.eval(r.clamp(lo_eff, hi_eff)) * s[0]];
        let stop = |st: &dop853::DenseStep<2>| {
            stop_at_zero && !trajectory::sign_changes(std::slice::from_ref(st), 0, r_start).is_empty()
        };
        let part = dop853::solve_until(rhs, lo, y, hi, h0, &opts, stop)?;
        let last = part.last().expect("solver returns at least one step");
        y = last.end();
        h0 = Some(last.h);
        let done = last.t1() < hi;
        steps.extend(part);
        if done {
            break;
        }
    }
    Ok(SLTrajectory::new(steps, profile.clone(), r_start, tol))
}

/// Initial data for a solution with `w(0) = 0`, `w'(0) = 1`.
///
/// Starts at the origin when the profile is finite there; otherwise at `eps`
/// with `w(eps) = eps`, `w'(eps) = 1`, which perturbs the solution by `O(eps²·b)`.
pub fn origin_start(profile: &CurvatureProfile, eps: f64) -> (f64, f64, f64) {
    if profile.finite_at_origin() {
        (0.0, 0.0, 1.0)
    } else {
        let r = eps.max(profile.r_min());
        (r, r, 1.0)
    }
}

/// Outcome of a second-zero search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondZero {
    pub r0: f64,
    /// First zero strictly after `r0`, if one occurs before `r_end`.
    pub r1: Option<f64>,
    pub r_end: f64,
    pub w_end: f64,
    pub wp_end: f64,
    /// Number of extrema of `y` seen before `r_end` (or before `r1`).
    pub extrema: usize,
}

impl SecondZero {
    /// True when the search ended with `y > 0` and `y' > 0`: evidence only, not a proof.
    pub fn positive_and_increasing(&self) -> bool {
        self.r1.is_none() && self.w_end > 0.0 && self.wp_end > 0.0
    }
}

/// First zero after `r0` of the solution with `y(r0) = 0`, `y'(r0) = 1`.
pub fn find_second_zero(
    profile: &CurvatureProfile,
    r0: f64,
    r_max: f64,
    tol: f64,
) -> Result<SecondZero> {
    let traj = integrate_to_first_zero(profile, r0, 0.0, 1.0, r_max, tol)?;
    let (w_end, wp_end) = traj.end_state();
    let r1 = traj.zeros.first().copied();
    let extrema = traj.extrema.iter().filter(|&&e| r1.is_none_or(|z| e < z)).count();
    Ok(SecondZero { r0, r1, r_end: traj.r_end, w_end, wp_end, extrema })
}

/// Inputs of the Myers index form `(n-1)∫y'² - ∫ric·y²` over `[r0, r1]`.
pub struct IndexFormInput<'a> {
    pub n: usize,
    pub y: &'a SLTrajectory,
    pub r0: f64,
    pub r1: f64,
    pub ric: &'a CurvatureProfile,
}

pub fn index_form(input: &IndexFormInput<'_>) -> Result<f64> {
    let IndexFormInput { n, y, r0, r1, ric } = *input;
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension n = {n} < 2")));
    }
    if !(r0 < r1) || r0 < y.r_start || r1 > y.r_end {
        return Err(Error::InvalidInput(format!(
            "[{r0}, {r1}] not inside the trajectory range [{}, {}]",
            y.r_start, y.r_end
        )));
    }
    if !ric.covers(r0, r1) {
        return Err(Error::DomainMismatch { label: ric.label().to_string(), lo: r0, hi: r1 });
    }
    let scale = y.max_abs_w().max(1.0);
    for r in [r0, r1] {
        let w = y.w(r).unwrap_or(f64::NAN);
        if !(w.abs() <= 1e3 * y.tol * scale) {
            return Err(Error::InvalidInput(format!("y({r}) = {w} is not a zero")));
        }
    }
    let mut cuts: Vec<f64> = vec![r0];
    cuts.extend(y.steps().iter().map(|s| s.t1()).filter(|&t| t > r0 && t < r1));
    cuts.extend(ric.breakpoints_in(r0, r1));
    cuts.push(r1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let rule = gl10();
    let nm1 = (n - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let step = y.steps().iter().find(|s| s.t0 <= lo && hi <= s.t1() + f64::EPSILON * hi.abs());
        let Some(step) = step else {
            return Err(Error::InvalidInput(format!("no dense step covers [{lo}, {hi}]")));
        };
        total += rule.integrate(lo, hi, |r| {
            let v = step.eval(r);
            nm1 * v[1] * v[1] - ric.eval(r) * v[0] * v[0]
        });
    }
    Ok(total)
}

/// Picone identity check `y'/y = w'/w - I/w²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiconeReport {
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// `10·tol·(window length)`.
    pub contract: f64,
    pub worst_r: f64,
}

pub const PICONE_SAMPLES: usize = 400;

/// Evaluate both sides of the Picone identity at evenly spaced radii in `(start, r_max]`.
///
/// `w` solves the `b` equation, `y` the `c` equation, both leaving the origin
/// with value 0 and slope 1. `I(r)` is the sum of `∫(c-b)w²` and
/// `∫((w'y - wy')/y)²`, accumulated with Gauss–Legendre on the merged step grid.
pub fn picone_residual(
    b: &CurvatureProfile,
    c: &CurvatureProfile,
    r_max: f64,
    tol: f64,
) -> Result<PiconeReport> {
    check_tol(tol)?;
    let (start_b, _, _) = origin_start(b, DEFAULT_EPS);
    let (start_c, _, _) = origin_start(c, DEFAULT_EPS);
    let start = start_b.max(start_c);
    let (w0, w0p) = if start == 0.0 { (0.0, 1.0) } else { (start, 1.0) };
    let wt = integrate_sl(b, start, w0, w0p, r_max, tol)?;
    let yt = integrate_sl(c, start, w0, w0p, r_max, tol)?;
    if let Some(&z) = yt.zeros.first() {
        return Err(Error::YVanished { r: z });
    }
    if let Some(&z) = wt.zeros.first() {
        return Err(Error::InvalidInput(format!("b-solution vanishes at r = {z}")));
    }

    let mut cuts: Vec<f64> = wt.grid();
    cuts.extend(yt.grid());
    cuts.extend(b.breakpoints_in(start, r_max));
    cuts.extend(c.breakpoints_in(start, r_max));
    let samples: Vec<f64> = (1..=PICONE_SAMPLES)
        .map(|j| start + (r_max - start) * j as f64 / PICONE_SAMPLES as f64)
        .collect();
    cuts.extend(samples.iter().copied());
    cuts.retain(|&r| r >= start && r <= r_max);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let integrand = |r: f64| {
        let (w, wp) = wt.eval(r).expect("inside range");
        let (y, yp) = yt.eval(r).expect("inside range");
        let q = (wp * y - w * yp) / y;
        (c.eval(r) - b.eval(r)) * w * w + q * q
    };
    let rule = gl10();
    let mut acc = 0.0;
    let mut next = 0;
    let mut worst: f64 = 0.0;
    let mut worst_r = samples[0];
    for win in cuts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let lo_in = lo.next_up().min(hi);
        let hi_in = hi.next_down().max(lo);
        acc += rule.integrate(lo, hi, |r| integrand(r.clamp(lo_in, hi_in)));
        while next < samples.len() && samples[next] <= hi {
            let r = samples[next];
            let (w, wp) = wt.eval(r).expect("inside range");
            let (y, yp) = yt.eval(r).expect("inside range");
            let lhs = yp / y;
            let rhs = wp / w - acc / (w * w);
            let d = (lhs - rhs).abs();
            if !(d <= worst) {
                worst = d;
                worst_r = r;
            }
            next += 1;
        }
    }
    Ok(PiconeReport {
        residual: worst,
        window: (start, r_max),
        samples: samples.len(),
        contract: 10.0 * tol * (r_max - start),
        worst_r,
    })
}
