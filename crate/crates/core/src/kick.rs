//! Kick thresholds, diameter bounds, and compactness certificates.

use std::f64::consts::{E, FRAC_PI_2};

use serde::Serialize;

use crate::bifurcator::{self, SideVerdict};
use crate::closed_form::{f_k, log_product, KickSpec};
use crate::error::{Error, Result};
use crate::roots;
use crate::sl_engine::{find_second_zero, CurvatureProfile};

/// Published remark value for the shell `a = e`, `b = e²`.
pub const LITERATURE_LAMBDA_E_E2: f64 = 0.46;

struct Shell {
    /// `L(b) - L(a)`
    t: f64,
    /// `L(a) - L(r0)`
    d: f64,
}

fn shell(k: u32, r0: f64, a: f64, b: f64) -> Result<Shell> {
    KickSpec { r0, a, b, mu: 0.0, k }.validate()?;
    let spec = KickSpec { r0, a, b, mu: 0.0, k };
    let (l0, la, lb) = (spec.phase(r0)?, spec.phase(a)?, spec.phase(b)?);
    if !(lb > la) {
        return Err(Error::InvalidShell(format!("degenerate shell [{a}, {b}]")));
    }
    Ok(Shell { t: lb - la, d: la - l0 })
}

/// Smallest positive root of `cot(λ (L(b) - L(a))) = λ (L(a) - L(r0))` with `L = ln^{k+1}`.
///
/// The root lies in `(0, π/(2(L(b) - L(a)))]`. Bisection runs on the
/// sign-equivalent form `cos(λT) - λD sin(λT)`, which stays finite at `λ → 0`.
pub fn lambda_log(k: u32, r0: f64, a: f64, b: f64) -> Result<f64> {
    let Shell { t, d } = shell(k, r0, a, b)?;
    let hi = FRAC_PI_2 / t;
    if d == 0.0 {
        return Ok(hi);
    }
    let g = |lam: f64| (lam * t).cos() - lam * d * (lam * t).sin();
    if g(hi) >= 0.0 {
        // Only rounding keeps g(hi) from being negative: D is below resolution.
        return Ok(hi);
    }
    roots::bisect(g, 0.0, hi)
        .ok_or_else(|| Error::InvalidShell(format!("no threshold root on (0, {hi}]")))
}

/// `cot(λ ln(b/a)) = λ ln(a/r0)`; identical to `lambda_log(0, ...)`.
pub fn lambda_linear(r0: f64, a: f64, b: f64) -> Result<f64> {
    lambda_log(0, r0, a, b)
}

/// `|cot(λT) - λD|`, the residual of the threshold equation.
pub fn threshold_residual(k: u32, r0: f64, a: f64, b: f64, lambda: f64) -> Result<f64> {
    let Shell { t, d } = shell(k, r0, a, b)?;
    Ok((1.0 / (lambda * t).tan() - lambda * d).abs())
}

/// Notes comparing computed thresholds with published figures.
pub fn discrepancy_notes(k: u32, r0: f64, a: f64, b: f64, lambda: f64) -> Vec<String> {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1.0);
    let mut notes = Vec::new();
    if k == 0 && close(a / r0, E) && close(b / r0, E * E) {
        notes.push(format!(
            "literature value for a = e, b = e^2 is lambda ~ {LITERATURE_LAMBDA_E_E2}; \
             the threshold equation with r0 = 1 gives cot(lambda) = lambda, root {lambda:.12}; \
             the published figure is reported, not used"
        ));
    }
    notes
}

/// `2·r1`, twice the second zero of the exact solution.
pub fn diameter_bound(spec: &KickSpec) -> Result<f64> {
    Ok(2.0 * crate::closed_form::second_zero_closed_form(spec)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Compact,
    NoncompactSide,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub grid_size: usize,
    /// Relative margin by which the kick amplitude must exceed the threshold.
    pub margin: f64,
    /// Relative slack allowed in the pointwise `≥` checks.
    pub slack: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub diameter_bound: Option<f64>,
    pub lambda: Option<f64>,
    pub spec: KickSpec,
    pub grid_size: usize,
    pub tolerances: Tolerances,
    pub discrepancy_notes: Vec<String>,
    pub profile: String,
    pub n: usize,
    /// Effective kick amplitude `min over [a,b] of Π_k·sqrt(b(r) - F_k(r,0))`.
    pub mu_effective: Option<f64>,
    pub all_origins: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions<'a> {
    pub tol: f64,
    pub grid_size: usize,
    pub margin: f64,
    pub slack: f64,
    pub all_origins: bool,
    /// An SL-bifurcator bounding `(n-1)·profile` from above, if known.
    pub bifurcator: Option<&'a CurvatureProfile>,
}

impl Default for CertifyOptions<'_> {
    fn default() -> Self {
        Self { tol: 1e-10, grid_size: 10_000, margin: 1e-6, slack: 1e-12, all_origins: false, bifurcator: None }
    }
}

/// `n` log-spaced radii covering `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (l0, l1) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// Certify compactness for `profile = Ric/(n-1)` against the kick `spec`.
///
/// Checks `profile ≥ F_k(r, 0)` on a log grid over `[r0, r_max]`, derives the
/// effective amplitude on `[a, b]`, and if it beats `λ_k` integrates the
/// comparison equation `y'' + F_k(r, μ_eff χ) y = 0` to find the conjugate point.
pub fn certify(
    profile: &CurvatureProfile,
    n: usize,
    spec: &KickSpec,
    r_max: f64,
    opts: &CertifyOptions<'_>,
) -> Result<Certificate> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension n = {n} < 2")));
    }
    spec.validate()?;
    if !(r_max > spec.b) {
        return Err(Error::InvalidInput(format!("r_max = {r_max} must exceed b = {}", spec.b)));
    }
    let k = spec.k;
    let lambda = lambda_log(k, spec.r0, spec.a, spec.b)?;
    let tolerances = Tolerances {
        tol: opts.tol,
        grid_size: opts.grid_size,
        margin: opts.margin,
        slack: opts.slack,
        r_max,
    };
    let mut cert = Certificate {
        verdict: Verdict::Inconclusive,
        r0: None,
        r1: None,
        diameter_bound: None,
        lambda: Some(lambda),
        spec: *spec,
        grid_size: opts.grid_size,
        tolerances,
        discrepancy_notes: discrepancy_notes(k, spec.r0, spec.a, spec.b, lambda),
        profile: profile.label().to_string(),
        n,
        mu_effective: None,
        all_origins: opts.all_origins,
        reason: None,
    };

    if let Some(bif) = opts.bifurcator {
        let sup = profile.scaled((n - 1) as f64);
        let side = bifurcator::noncompact_side_check(&sup, bif, r_max, opts.grid_size)?;
        if side.verdict == SideVerdict::NoncompactSide {
            cert.verdict = Verdict::NoncompactSide;
            cert.reason = Some(format!(
                "(n-1)*profile <= bifurcator '{}' on the grid; liminf diagnostic {:e}",
                bif.label(),
                side.liminf_diagnostic
            ));
            return Ok(cert);
        }
    }

    if !profile.covers(spec.r0, r_max) {
        return Err(Error::DomainMismatch { label: profile.label().to_string(), lo: spec.r0, hi: r_max });
    }
    let mut grid = log_grid(spec.r0, r_max, opts.grid_size);
    grid.extend([spec.a, spec.b]);
    grid.sort_by(f64::total_cmp);
    for &r in &grid {
        let base = f_k(r, 0.0, k)?;
        let v = profile.eval(r);
        if !(v >= base * (1.0 - opts.slack)) {
            cert.reason = Some(format!("profile {v:e} < F_{k}(r,0) = {base:e} at r = {r}"));
            return Ok(cert);
        }
    }

    let shell = log_grid(spec.a, spec.b, opts.grid_size);
    let mut mu_eff = f64::INFINITY;
    for &r in &shell {
        let excess = (profile.eval(r) - f_k(r, 0.0, k)?).max(0.0);
        mu_eff = mu_eff.min(log_product(k, r)? * excess.sqrt());
    }
    cert.mu_effective = Some(mu_eff);
    if !(mu_eff > lambda * (1.0 + opts.margin)) {
        cert.reason = Some(format!(
            "kick amplitude {mu_eff:.12} on [a, b] does not exceed lambda_{k} = {lambda:.12} by margin {}",
            opts.margin
        ));
        return Ok(cert);
    }

    let comparison = spec.with_mu(mu_eff).profile();
    let sz = find_second_zero(&comparison, spec.r0, r_max, opts.tol)?;
    match sz.r1 {
        Some(r1) => {
            cert.verdict = Verdict::Compact;
            cert.r0 = Some(spec.r0);
            cert.r1 = Some(r1);
            cert.diameter_bound = Some(if opts.all_origins { r1 } else { 2.0 * r1 });
        }
        None => {
            cert.reason = Some(format!(
                "comparison solution has no second zero before r_max = {r_max} (y = {:e}, y' = {:e})",
                sz.w_end, sz.wp_end
            ));
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn base_at_shell_start_gives_quarter_period() {
        let l = lambda_linear(1.0, 1.0, E).unwrap();
        assert_eq!(l, FRAC_PI_2);
    }

    #[test]
    fn linear_threshold_e_e2() {
        let l = lambda_linear(1.0, E, E * E).unwrap();
        assert!(threshold_residual(0, 1.0, E, E * E, l).unwrap() < 1e-12);
        assert!((l - 0.860_333_589_019_38).abs() < 1e-12, "{l}");
    }

    #[test]
    fn invalid_shell() {
        assert!(matches!(lambda_linear(2.0, 1.0, 3.0), Err(Error::InvalidShell(_))));
        assert!(matches!(lambda_linear(1.0, 3.0, 3.0), Err(Error::InvalidShell(_))));
    }

    #[test]
    fn log_reduces_to_linear() {
        assert_eq!(lambda_log(0, 1.0, E, E * E).unwrap(), lambda_linear(1.0, E, E * E).unwrap());
    }

    #[test]
    fn diameter_case_one() {
        let spec = KickSpec::linear(1.0, 1.0, 1e9, 1.0);
        assert!((diameter_bound(&spec).unwrap() - 2.0 * PI.exp()).abs() < 1e-9);
    }

    #[test]
    fn notes_only_for_e_e2() {
        assert_eq!(discrepancy_notes(0, 1.0, E, E * E, 0.86).len(), 1);
        assert!(discrepancy_notes(0, 1.0, 2.0, 5.0, 0.5).is_empty());
    }
}
