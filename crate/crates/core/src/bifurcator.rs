//! SL-bifurcator classification, Abresch-type checks, and the two halves of
//! the boundary test (comparison above a bifurcator, domination below it).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kick::log_grid;
use crate::quadrature;
use crate::sl_engine::{
    integrate_sl, integrate_to_first_zero, origin_start, CurvatureProfile, SLTrajectory, DEFAULT_EPS,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason")]
pub enum NotBifurcatorReason {
    SecondZero { r: f64 },
    NonMonotone { r: f64 },
    Unbounded { w_end: f64, cap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Classification {
    Bifurcator,
    NotBifurcator(NotBifurcatorReason),
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub tol: f64,
    /// Cauchy-tail threshold for `w(r_max) - w(r_max/2)`; default `1e-4·w(r_max)`.
    pub tail_tol: Option<f64>,
    /// `w` above this with a still-growing tail counts as unbounded.
    pub cap: f64,
    pub eps: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { tol: 1e-10, tail_tol: None, cap: 1e3, eps: DEFAULT_EPS }
    }
}

pub const DEFAULT_R_MAX: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcatorReport {
    pub classification: Classification,
    pub profile: String,
    pub r_start: f64,
    pub r_max: f64,
    pub tol: f64,
    pub w_at_rmax: f64,
    pub wp_at_rmax: f64,
    /// `w(r_max) - w(r_max/2)`.
    pub tail: f64,
    pub tail_tol: f64,
    /// Aitken extrapolation of `w` over the dyads `r_max/4, r_max/2, r_max`.
    pub w_limit: Option<f64>,
    pub abresch: Option<AbreschReport>,
}

/// Run the `w(0) = 0`, `w'(0) = 1` solution out to `r_max` and classify it.
pub fn classify(b: &CurvatureProfile, r_max: f64, opts: &ClassifyOptions) -> Result<BifurcatorReport> {
    let (r_start, w0, w0p) = origin_start(b, opts.eps);
    if !(r_max > 2.0 * r_start) {
        return Err(Error::InvalidInput(format!("r_max = {r_max} too small")));
    }
    let traj = integrate_to_first_zero(b, r_start, w0, w0p, r_max, opts.tol)?;
    let (w_end, wp_end) = traj.end_state();
    let mut report = BifurcatorReport {
        classification: Classification::Bifurcator,
        profile: b.label().to_string(),
        r_start,
        r_max,
        tol: opts.tol,
        w_at_rmax: w_end,
        wp_at_rmax: wp_end,
        tail: f64::NAN,
        tail_tol: f64::NAN,
        w_limit: None,
        abresch: None,
    };
    if let Some(&z) = traj.zeros.first() {
        report.classification = Classification::NotBifurcator(NotBifurcatorReason::SecondZero { r: z });
        return Ok(report);
    }
    if let Some(&e) = traj.extrema.first() {
        report.classification = Classification::NotBifurcator(NotBifurcatorReason::NonMonotone { r: e });
        return Ok(report);
    }
    let w_half = traj.w(0.5 * r_max).expect("inside range");
    let w_quarter = traj.w(0.25 * r_max).filter(|_| 0.25 * r_max > r_start);
    let tail = w_end - w_half;
    let tail_tol = opts.tail_tol.unwrap_or(1e-4 * w_end.abs());
    report.tail = tail;
    report.tail_tol = tail_tol;
    report.w_limit = w_quarter.map(|wq| aitken(wq, w_half, w_end));
    report.classification = if tail <= tail_tol {
        Classification::Bifurcator
    } else if w_end > opts.cap {
        Classification::NotBifurcator(NotBifurcatorReason::Unbounded { w_end, cap: opts.cap })
    } else {
        Classification::Inconclusive {
            reason: format!("monotone but w(r_max) - w(r_max/2) = {tail:e} exceeds tail_tol = {tail_tol:e}"),
        }
    };
    Ok(report)
}

fn aitken(w0: f64, w1: f64, w2: f64) -> f64 {
    let d1 = w1 - w0;
    let d2 = w2 - w1;
    let ratio = d2 / d1;
    if d1 != 0.0 && ratio > 0.0 && ratio < 1.0 {
        w2 + d2 * d2 / (d1 - d2)
    } else {
        w2
    }
}

/// `∫ r b(r) dr` over `[start, r_max]` with its dyadic convergence evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Integrals over the dyads `[r_max/2^{j+1}, r_max/2^j]`, outermost last.
    pub dyads: Vec<f64>,
    /// Ratio of the last two dyadic increments.
    pub tail_ratio: f64,
    /// Geometric tail bound `Δ·ρ/(1-ρ)` from the last increment and ratio.
    pub tail_bound: f64,
    pub quadrature_converged: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependentSolution {
    pub r_start: f64,
    pub v_at_rmax: f64,
    /// `w(r_max)·∫ dr/w²`, the reduction-of-order value.
    pub v_reduction: f64,
    pub diverges: bool,
    /// Largest `|w v' - w' v - 1|` on the step grid.
    pub wronskian_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbreschReport {
    pub moment: MomentEstimate,
    pub wp_at_rmax: f64,
    /// Least-squares slope of `log|w'|` against `log r` on `[r_max/8, r_max]`.
    pub wp_loglog_slope: f64,
    pub independent: IndependentSolution,
}

const DYADS: usize = 10;

/// Adaptive quadrature of `∫ r b dr` split at breakpoints and dyads.
pub fn moment_integral(b: &CurvatureProfile, start: f64, r_max: f64) -> MomentEstimate {
    let mut edges: Vec<f64> = (0..=DYADS).rev().map(|j| r_max / 2f64.powi(j as i32)).collect();
    edges.retain(|&r| r > start);
    edges.insert(0, start);
    let mut ok = true;
    let mut pieces = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let mut cuts = vec![w[0]];
        cuts.extend(b.breakpoints_in(w[0], w[1]));
        cuts.push(w[1]);
        let mut acc = 0.0;
        for c in cuts.windows(2) {
            let (lo, hi) = (c[0], c[1]);
            let q = quadrature::adaptive(
                |r: f64| r * b.eval(r.clamp(lo.next_up(), hi.next_down())),
                lo,
                hi,
                1e-300,
                1e-13,
                2000,
            );
            ok &= q.converged;
            acc += q.value;
        }
        pieces.push(acc);
    }
    let value: f64 = pieces.iter().sum();
    let dyads: Vec<f64> = pieces[1..].to_vec();
    let (tail_ratio, tail_bound) = match dyads.as_slice() {
        [.., p, l] => {
            let rho = l / p;
            let bound = if rho > 0.0 && rho < 1.0 { l * rho / (1.0 - rho) } else { f64::INFINITY };
            (rho, bound)
        }
        _ => (f64::NAN, f64::INFINITY),
    };
    MomentEstimate {
        value,
        dyads,
        tail_ratio,
        tail_bound,
        quadrature_converged: ok,
        converged: ok && tail_ratio < 1.0,
    }
}

/// The three Abresch-type diagnostics for a (presumed) bifurcator.
pub fn abresch_checks(b: &CurvatureProfile, r_max: f64, opts: &ClassifyOptions) -> Result<AbreschReport> {
    let (r_start, w0, w0p) = origin_start(b, opts.eps);
    let moment = moment_integral(b, r_start, r_max);
    let traj = integrate_sl(b, r_start, w0, w0p, r_max, opts.tol)?;
    let (_, wp_end) = traj.end_state();
    let wp_loglog_slope = loglog_slope(&traj, r_max / 8.0, r_max);
    let independent = independent_solution(b, &traj, r_max, opts.tol)?;
    Ok(AbreschReport { moment, wp_at_rmax: wp_end, wp_loglog_slope, independent })
}

fn loglog_slope(traj: &SLTrajectory, lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> = log_grid(lo, hi, 64)
        .into_iter()
        .filter_map(|r| traj.eval(r).map(|(_, wp)| (r.ln(), wp.abs().ln())))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Second solution with `v(r_s) = 0`, `v'(r_s) = 1/w(r_s)`, so `w v' - w' v ≡ 1`.
fn independent_solution(
    b: &CurvatureProfile,
    w: &SLTrajectory,
    r_max: f64,
    tol: f64,
) -> Result<IndependentSolution> {
    let last_structure = b.breakpoints().iter().copied().filter(|&x| x < r_max).fold(0.0, f64::max);
    let r_s = w.r_start.max(last_structure).max(1.0).min(0.5 * r_max);
    let ws = w.w(r_s).expect("inside range");
    let v = integrate_sl(b, r_s, 0.0, 1.0 / ws, r_max, tol)?;
    let mut drift: f64 = 0.0;
    for r in v.grid() {
        let (wv, wp) = w.eval(r).expect("inside range");
        let (vv, vp) = v.eval(r).expect("inside range");
        drift = drift.max((wv * vp - wp * vv - 1.0).abs());
    }
    let (v_end, _) = v.end_state();
    let inv_sq = quadrature::adaptive(
        |r: f64| {
            let x = w.w(r).expect("inside range");
            1.0 / (x * x)
        },
        r_s,
        r_max,
        0.0,
        1e-12,
        4000,
    );
    let v_reduction = w.w(r_max).expect("inside range") * inv_sq.value;
    Ok(IndependentSolution {
        r_start: r_s,
        v_at_rmax: v_end,
        v_reduction,
        diverges: v_end.abs() > 1e3,
        wronskian_drift: drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum BoundaryVerdict {
    CompactSide { r1: f64 },
    NoEvidence { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub verdict: BoundaryVerdict,
    pub r_start: f64,
    pub r_max: f64,
    /// Largest `c - b` on the grid.
    pub max_excess: f64,
    pub grid_size: usize,
}

fn comparison_grid(lo: f64, hi: f64, n: usize, extra: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    g.extend(log_grid(lo.max(hi * 1e-8), hi, n));
    g.extend(extra.iter().copied().filter(|&x| x >= lo && x <= hi));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Compact-side half: if `c` exceeds the bifurcator `b`, the `c`-solution vanishes again.
pub fn boundary_test(
    b: &CurvatureProfile,
    c: &CurvatureProfile,
    r_max: f64,
    grid_size: usize,
    opts: &ClassifyOptions,
) -> Result<BoundaryReport> {
    let (sb, _, _) = origin_start(b, opts.eps);
    let (sc, _, _) = origin_start(c, opts.eps);
    let start = sb.max(sc);
    let mut extra: Vec<f64> = b.breakpoints().to_vec();
    extra.extend_from_slice(c.breakpoints());
    let mut max_excess = f64::NEG_INFINITY;
    for r in comparison_grid(start, r_max, grid_size, &extra) {
        let (bv, cv) = (b.eval(r), c.eval(r));
        if !(cv >= bv - 1e-12 * bv.abs()) {
            return Err(Error::ExceedanceViolated { r });
        }
        max_excess = max_excess.max(cv - bv);
    }
    let (r_start, w0, w0p) = if start == 0.0 { (0.0, 0.0, 1.0) } else { (start, start, 1.0) };
    let traj = integrate_to_first_zero(c, r_start, w0, w0p, r_max, opts.tol)?;
    let verdict = match traj.zeros.first() {
        Some(&r1) => BoundaryVerdict::CompactSide { r1 },
        None => {
            let (w, wp) = traj.end_state();
            BoundaryVerdict::NoEvidence {
                reason: format!(
                    "no second zero up to r_max = {r_max} (w = {w:e}, w' = {wp:e}); a zero may lie beyond r_max"
                ),
            }
        }
    };
    Ok(BoundaryReport { verdict, r_start, r_max, max_excess, grid_size })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SideVerdict {
    NoncompactSide,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideReport {
    pub verdict: SideVerdict,
    pub first_violation: Option<f64>,
    /// `min b` over `[r_max/2, r_max]`.
    pub liminf_diagnostic: f64,
    pub r_max: f64,
}

/// Noncompact-side half: the supremal curvature stays below the bifurcator.
pub fn noncompact_side_check(
    profile_sup: &CurvatureProfile,
    b: &CurvatureProfile,
    r_max: f64,
    grid_size: usize,
) -> Result<SideReport> {
    let start = |p: &CurvatureProfile| if p.finite_at_origin() { 0.0 } else { p.r_min().max(DEFAULT_EPS) };
    let lo = start(profile_sup).max(start(b));
    let mut extra: Vec<f64> = b.breakpoints().to_vec();
    extra.extend_from_slice(profile_sup.breakpoints());
    let mut first_violation = None;
    for r in comparison_grid(lo, r_max, grid_size, &extra) {
        let (s, bv) = (profile_sup.eval(r), b.eval(r));
        if !(s <= bv + 1e-12 * bv.abs()) {
            first_violation = Some(r);
            break;
        }
    }
    let liminf_diagnostic = log_grid(0.5 * r_max, r_max, 256)
        .into_iter()
        .map(|r| b.eval(r))
        .fold(f64::INFINITY, f64::min);
    Ok(SideReport {
        verdict: if first_violation.is_none() { SideVerdict::NoncompactSide } else { SideVerdict::NotApplicable },
        first_violation,
        liminf_diagnostic,
        r_max,
    })
}
