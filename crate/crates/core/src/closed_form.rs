//! Iterated logarithms, the `F_k` curvature family, and exact piecewise
//! solutions of the kicked equation `y'' + F_k(r, μ·χ[a,b](r)) y = 0`.
//!
//! On every interval the solutions have the form `Φ(r)·g(L(r))` with phase
//! `L = ln^{k+1} r` and envelope `Φ = (r ln r ⋯ ln^k r)^{1/2}`:
//! `g` is affine in `L` off the shell and a sinusoid of frequency `μ` on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl_engine::CurvatureProfile;

/// `e_k` with `ln^k(e_k) = 0`: `e_0 = 0`, `e_{k+1} = exp(e_k)`.
pub fn superpower(k: u32) -> f64 {
    (0..k).fold(0.0, |e, _| f64::exp(e))
}

/// Which domain `iter_log` should enforce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogContract {
    /// `r > e_k`, so the result is positive.
    Positive,
    /// `r > e_{k-1}`, so the result is merely defined.
    Defined,
}

/// `ln^k r`, with every intermediate argument checked.
pub fn iter_log(k: u32, r: f64, contract: LogContract) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::Domain(format!("ln^{k} of non-finite {r}")));
    }
    let mut x = r;
    for j in 0..k {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("ln^{} of {r}: argument {x} is not positive", j + 1)));
        }
        x = x.ln();
    }
    if contract == LogContract::Positive && !(x > 0.0) {
        return Err(Error::Domain(format!("ln^{k}({r}) = {x} is not positive (need r > e_{k})")));
    }
    Ok(x)
}

/// `exp^k x`, the inverse of `ln^k`.
pub fn iter_exp(k: u32, x: f64) -> f64 {
    (0..k).fold(x, |v, _| v.exp())
}

/// `(ln^0 r, ..., ln^k r)`; requires `r > e_k`.
fn log_chain(k: u32, r: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut x = r;
    out.push(x);
    for _ in 0..k {
        x = x.ln();
        out.push(x);
    }
    if !r.is_finite() || !(x > 0.0) {
        return Err(Error::Domain(format!("r = {r} must exceed e_{k} = {}", superpower(k))));
    }
    Ok(out)
}

/// `Π_k(r) = r · ln r ⋯ ln^k r`.
pub fn log_product(k: u32, r: f64) -> Result<f64> {
    Ok(log_chain(k, r)?.iter().product())
}

/// `F_k(r, μ) = ¼ Σ_{j<k} 1/Π_j² + (1 + 4μ²)/(4Π_k²)`.
pub fn f_k(r: f64, mu: f64, k: u32) -> Result<f64> {
    let chain = log_chain(k, r)?;
    let mut pi = 1.0;
    let mut sum = 0.0;
    for x in &chain {
        pi *= x;
        sum += 1.0 / (pi * pi);
    }
    Ok(0.25 * sum + mu * mu / (pi * pi))
}

/// `Φ_k(r) = (r ln r ⋯ ln^{k-1} r)^{1/2}` for `k ≥ 1`.
///
/// `Φ_k(A + B ln^k r)` solves `y'' + F_{k-1}(r, 0) y = 0`.
pub fn phi_k(k: u32, r: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("phi_k needs k >= 1".into()));
    }
    Ok(log_product(k - 1, r)?.sqrt())
}

/// A kicked shell: base point `r0`, shell `[a, b]`, amplitude `mu`, log depth `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickSpec {
    pub r0: f64,
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub k: u32,
}

impl KickSpec {
    pub fn linear(r0: f64, a: f64, b: f64, mu: f64) -> Self {
        Self { r0, a, b, mu, k: 0 }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    /// Check `e_k < r0 ≤ a < b` and `μ ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        let Self { r0, a, b, mu, k } = *self;
        if ![r0, a, b, mu].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite kick parameters {self:?}")));
        }
        if !(mu >= 0.0) {
            return Err(Error::InvalidInput(format!("mu = {mu} must be >= 0")));
        }
        let ek = superpower(k);
        if !(r0 > ek) {
            return Err(Error::Domain(format!("r0 = {r0} must exceed e_{k} = {ek}")));
        }
        if !(r0 <= a && a < b) {
            return Err(Error::InvalidShell(format!("need r0 <= a < b, got r0 = {r0}, a = {a}, b = {b}")));
        }
        Ok(())
    }

    pub fn chi(&self, r: f64) -> f64 {
        if (self.a..=self.b).contains(&r) {
            1.0
        } else {
            0.0
        }
    }

    /// The kicked coefficient `F_k(r, μ·χ(r))`.
    pub fn coefficient(&self, r: f64) -> Result<f64> {
        f_k(r, self.mu * self.chi(r), self.k)
    }

    /// The kicked coefficient as a profile with breakpoints at `a` and `b`.
    pub fn profile(&self) -> CurvatureProfile {
        let spec = *self;
        let base = CurvatureProfile::new(
            format!("F{}-kick(mu={}, a={}, b={})", spec.k, spec.mu, spec.a, spec.b),
            superpower(spec.k),
            move |r| spec.coefficient(r).unwrap_or(f64::NAN),
        );
        base.with_breakpoints(vec![spec.a, spec.b])
    }

    pub fn phase(&self, r: f64) -> Result<f64> {
        iter_log(self.k + 1, r, LogContract::Defined)
    }

    pub fn phase_inverse(&self, l: f64) -> f64 {
        iter_exp(self.k + 1, l)
    }

    /// Envelope `Φ = Π_k^{1/2}` and its log-derivative `½ Σ_j 1/Π_j`.
    fn envelope(&self, r: f64) -> Result<(f64, f64)> {
        let chain = log_chain(self.k, r)?;
        let mut pi = 1.0;
        let mut dlog = 0.0;
        for x in &chain {
            pi *= x;
            dlog += 0.5 / pi;
        }
        Ok((pi.sqrt(), dlog))
    }

    fn frame(&self) -> Result<Frame> {
        self.validate()?;
        let l0 = self.phase(self.r0)?;
        let la = self.phase(self.a)?;
        let lb = self.phase(self.b)?;
        let norm = log_product(self.k, self.r0)?.sqrt();
        Ok(Frame { l0, la, lb, d: la - l0, norm })
    }
}

struct Frame {
    l0: f64,
    la: f64,
    lb: f64,
    /// `D = L(a) - L(r0)`.
    d: f64,
    /// Scales the solution to `y'(r0) = 1`.
    norm: f64,
}

impl Frame {
    fn theta(&self, mu: f64) -> f64 {
        mu * (self.lb - self.la)
    }

    /// `(α', β')` of `g = α' + β'(L - L_b)` on `[b, ∞)`.
    fn outer(&self, mu: f64) -> (f64, f64) {
        let th = self.theta(mu);
        let (s, c) = th.sin_cos();
        (self.d * c + s / mu, c - mu * self.d * s)
    }
}

/// Coefficients of the middle and outer branches.
///
/// Middle: `y = C·Φ(r)(A cos(μL) + B sin(μL))` with `C = Π_k(r0)^{1/2}` (so
/// `C = 1` when `k = 0, r0 = 1`). Outer: `y = (Φ(r)/Φ(b))(α + β(L - L(b)))`,
/// so `α = y(b)` and for `k = 0` the outer branch reads `(r/b)^{1/2}(α + β ln(r/b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct MatchingCoefficients {
    pub A: f64,
    pub B: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn matching_coefficients(spec: &KickSpec) -> Result<MatchingCoefficients> {
    let f = spec.frame()?;
    let mu = spec.mu;
    if mu == 0.0 {
        return Err(Error::DegenerateMu);
    }
    let (s, c) = (mu * f.la).sin_cos();
    let a_coef = f.d * c - s / mu;
    let b_coef = f.d * s + c / mu;
    let (ap, bp) = f.outer(mu);
    let scale = f.norm * spec.envelope(spec.b)?.0;
    Ok(MatchingCoefficients { A: a_coef, B: b_coef, alpha: scale * ap, beta: scale * bp })
}

/// The outer slope as transcribed in the literature for `k ≥ 1`:
/// `μ sin(μ(L_a - L_b))·D + cos(μ(L_a + L_b))`, in the same units as `β'`.
///
/// Matching at `b` gives `cos(μ(L_a - L_b))` for the second term; this
/// function exists only to quantify the difference in discrepancy notes.
pub fn transcribed_beta(spec: &KickSpec) -> Result<f64> {
    let f = spec.frame()?;
    let mu = spec.mu;
    Ok(mu * (mu * (f.la - f.lb)).sin() * f.d + (mu * (f.la + f.lb)).cos())
}

/// Matched outer slope `β' = cos θ - μ D sin θ` in the normalisation of [`transcribed_beta`].
pub fn matched_beta(spec: &KickSpec) -> Result<f64> {
    let f = spec.frame()?;
    Ok(f.outer(spec.mu).1)
}

/// `(y, y')` of the exact piecewise solution with `y(r0) = 0`, `y'(r0) = 1`.
pub fn kick_solution_with_derivative(spec: &KickSpec, r: f64) -> Result<(f64, f64)> {
    let f = spec.frame()?;
    if !(r >= spec.r0) {
        return Err(Error::Domain(format!("r = {r} is below r0 = {}", spec.r0)));
    }
    let mu = spec.mu;
    let l = spec.phase(r)?;
    let (phi, dlog) = spec.envelope(r)?;
    let lp = 1.0 / log_product(spec.k, r)?;
    let (g, gp) = if r <= spec.a {
        (l - f.l0, 1.0)
    } else if r <= spec.b {
        if mu == 0.0 {
            return Err(Error::DegenerateMu);
        }
        let (s, c) = (mu * (l - f.la)).sin_cos();
        (f.d * c + s / mu, -mu * f.d * s + c)
    } else {
        if mu == 0.0 {
            return Err(Error::DegenerateMu);
        }
        let (ap, bp) = f.outer(mu);
        (ap + bp * (l - f.lb), bp)
    };
    let y = f.norm * phi * g;
    let yp = f.norm * phi * (dlog * g + gp * lp);
    Ok((y, yp))
}

pub fn kick_solution(spec: &KickSpec, r: f64) -> Result<f64> {
    kick_solution_with_derivative(spec, r).map(|v| v.0)
}

/// The three-branch solution for `k = 0` and `r0 = 1`.
pub fn linear_kick_solution(spec: &KickSpec, r: f64) -> Result<f64> {
    if spec.k != 0 || spec.r0 != 1.0 {
        return Err(Error::InvalidInput(format!(
            "linear_kick_solution needs k = 0 and r0 = 1, got k = {}, r0 = {}",
            spec.k, spec.r0
        )));
    }
    kick_solution(spec, r)
}

/// The `μ = 0` solution `C·Φ(r)(L(r) - L(r0))`, valid for all `r ≥ r0`.
pub fn degenerate_solution(spec: &KickSpec, r: f64) -> Result<f64> {
    let f = spec.frame()?;
    let l = spec.phase(r)?;
    Ok(f.norm * spec.envelope(r)?.0 * (l - f.l0))
}

/// Which piece of the solution carries the second zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroCase {
    /// Inside the shell: `tan(μ(L - L_a)) = -μD`.
    Shell,
    /// Beyond the shell, on the affine tail with negative slope.
    Tail,
}

/// First zero after `r0`, with the branch it lies on.
pub fn second_zero_with_case(spec: &KickSpec) -> Result<(f64, ZeroCase)> {
    let f = spec.frame()?;
    let mu = spec.mu;
    let no_zero = || -> Result<Error> {
        let lambda = crate::kick::lambda_log(spec.k, spec.r0, spec.a, spec.b)?;
        Ok(Error::NoSecondZero { mu, lambda })
    };
    if mu == 0.0 {
        return Err(no_zero()?);
    }
    let psi = std::f64::consts::PI - (mu * f.d).atan();
    if psi <= f.theta(mu) {
        return Ok((spec.phase_inverse(f.la + psi / mu), ZeroCase::Shell));
    }
    let (ap, bp) = f.outer(mu);
    if bp < 0.0 {
        let r1 = spec.phase_inverse(f.lb - ap / bp);
        if !r1.is_finite() {
            return Err(Error::Domain(format!("second zero exists but exceeds the f64 range (mu = {mu})")));
        }
        return Ok((r1, ZeroCase::Tail));
    }
    Err(no_zero()?)
}

/// First zero after `r0` of the exact solution.
///
/// For `k = 0, r0 = 1` the tail case equals `b·e^F` with
/// `F = (ln a cos θ + sin θ/μ)/(μ ln a sin θ - cos θ)`, `θ = μ ln(b/a)`.
pub fn second_zero_closed_form(spec: &KickSpec) -> Result<f64> {
    second_zero_with_case(spec).map(|v| v.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn superpowers() {
        assert_eq!(superpower(0), 0.0);
        assert_eq!(superpower(1), 1.0);
        assert_eq!(superpower(2), E);
        assert_eq!(iter_log(1, superpower(1), LogContract::Defined).unwrap(), 0.0);
    }

    #[test]
    fn iter_log_values() {
        assert_eq!(iter_log(0, 7.3, LogContract::Positive).unwrap(), 7.3);
        assert!((iter_log(2, E.powf(E), LogContract::Positive).unwrap() - 1.0).abs() < 1e-15);
        assert!(iter_log(2, 0.5, LogContract::Defined).is_err());
        assert!(iter_log(2, 2.0, LogContract::Positive).is_err());
        assert!(iter_log(2, 2.0, LogContract::Defined).unwrap() < 0.0);
    }

    #[test]
    fn f_k_values() {
        assert_eq!(f_k(2.0, 0.0, 0).unwrap(), 1.0 / 16.0);
        let v = f_k(E * E, 0.0, 1).unwrap();
        let want = 0.25 * ((-4f64).exp() + (-4f64).exp() / 4.0);
        assert!((v - want).abs() < 1e-15 * want);
        assert!(f_k(1.0, 0.0, 1).is_err());
        // k = 0 equals the kicked coefficient with χ ≡ 1
        let want = (1.0 + 4.0 * 0.49) / (4.0 * 9.0);
        assert!((f_k(3.0, 0.7, 0).unwrap() - want).abs() < 4.0 * f64::EPSILON * want);
    }

    #[test]
    fn phi_k_values() {
        assert_eq!(phi_k(1, 4.0).unwrap(), 2.0);
        assert!((phi_k(2, E * E).unwrap() - (2.0 * E * E).sqrt()).abs() < 1e-14);
        assert!(phi_k(0, 2.0).is_err());
    }

    #[test]
    fn branches_are_continuous() {
        let spec = KickSpec::linear(1.0, E, E * E, 1.3);
        assert_eq!(kick_solution(&spec, 1.0).unwrap(), 0.0);
        let (_, yp) = kick_solution_with_derivative(&spec, 1.0).unwrap();
        assert!((yp - 1.0).abs() < 1e-15);
        let ya = kick_solution(&spec, E).unwrap();
        assert!((ya - E.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn case_one_with_kick_at_base() {
        let spec = KickSpec::linear(1.0, 1.0, 1e6, 1.0);
        let (r, case) = second_zero_with_case(&spec).unwrap();
        assert_eq!(case, ZeroCase::Shell);
        assert!((r - std::f64::consts::PI.exp()).abs() < 1e-12 * r);
    }

    #[test]
    fn mu_zero_is_degenerate() {
        let spec = KickSpec::linear(1.0, E, E * E, 0.0);
        assert_eq!(kick_solution(&spec, 10.0), Err(Error::DegenerateMu));
        let d = degenerate_solution(&spec, 10.0).unwrap();
        assert!((d - 10f64.sqrt() * 10f64.ln()).abs() < 1e-14);
        assert!(matches!(second_zero_closed_form(&spec), Err(Error::NoSecondZero { .. })));
    }
}
