use serde::Serialize;

use super::dop853::DenseStep;
use super::profile::CurvatureProfile;
use crate::roots;

/// Dense numerical solution of `w'' + b(r) w = 0`.
///
/// State index 0 is `w`, index 1 is `w'`. Steps never straddle a profile
/// breakpoint.
#[derive(Debug, Clone)]
pub struct SLTrajectory {
    steps: Vec<DenseStep<2>>,
    profile: CurvatureProfile,
    pub zeros: Vec<f64>,
    pub extrema: Vec<f64>,
    pub r_start: f64,
    pub r_end: f64,
    pub tol: f64,
}

/// Interior samples per step used to catch sign changes between step ends.
const PROBES: usize = 4;

impl SLTrajectory {
    pub(crate) fn new(
        steps: Vec<DenseStep<2>>,
        profile: CurvatureProfile,
        r_start: f64,
        tol: f64,
    ) -> Self {
        let r_end = steps.last().map_or(r_start, |s| s.t1());
        let zeros = sign_changes(&steps, 0, r_start);
        let extrema = sign_changes(&steps, 1, r_start);
        Self { steps, profile, zeros, extrema, r_start, r_end, tol }
    }

    pub fn steps(&self) -> &[DenseStep<2>] {
        &self.steps
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    /// Step boundaries, starting at `r_start`.
    pub fn grid(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.steps.len() + 1);
        g.push(self.r_start);
        g.extend(self.steps.iter().map(|s| s.t1()));
        g
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.steps.len() + 1);
        if let Some(s) = self.steps.first() {
            v.push(s.start()[0]);
        }
        v.extend(self.steps.iter().map(|s| s.end()[0]));
        v
    }

    pub fn derivatives(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.steps.len() + 1);
        if let Some(s) = self.steps.first() {
            v.push(s.start()[1]);
        }
        v.extend(self.steps.iter().map(|s| s.end()[1]));
        v
    }

    fn step_at(&self, r: f64) -> Option<&DenseStep<2>> {
        if !(r >= self.r_start && r <= self.r_end) {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.t1() < r);
        self.steps.get(idx.min(self.steps.len().saturating_sub(1)))
    }

    /// `(w(r), w'(r))` from the dense output, or `None` outside the integrated range.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        self.step_at(r).map(|s| {
            let y = s.eval(r);
            (y[0], y[1])
        })
    }

    pub fn w(&self, r: f64) -> Option<f64> {
        self.eval(r).map(|v| v.0)
    }

    pub fn end_state(&self) -> (f64, f64) {
        self.steps.last().map_or((f64::NAN, f64::NAN), |s| {
            let y = s.end();
            (y[0], y[1])
        })
    }

    pub fn max_abs_w(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest scaled ODE residual `|w'' + b w| / (|b w| + 1)` at step midpoints,
    /// with `w''` the derivative of the dense `w'` polynomial.
    pub fn max_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for st in &self.steps {
            let r = st.t0 + 0.5 * (st.t1() - st.t0);
            let (y, dy) = st.eval_with_derivative(r);
            let bw = self.profile.eval(r) * y[0];
            worst = worst.max((dy[1] + bw).abs() / (bw.abs() + 1.0));
        }
        worst
    }

    pub fn summary(&self) -> TrajectorySummary {
        let (w_end, wp_end) = self.end_state();
        TrajectorySummary {
            r_start: self.r_start,
            r_end: self.r_end,
            steps: self.steps.len(),
            zeros: self.zeros.clone(),
            extrema: self.extrema.clone(),
            w_end,
            wp_end,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub r_start: f64,
    pub r_end: f64,
    pub steps: usize,
    pub zeros: Vec<f64>,
    pub extrema: Vec<f64>,
    pub w_end: f64,
    pub wp_end: f64,
    pub tol: f64,
}

/// Roots of component `idx` strictly after `r_start`, refined with Brent on the dense output.
pub(crate) fn sign_changes(steps: &[DenseStep<2>], idx: usize, r_start: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let push = |r: f64, out: &mut Vec<f64>| {
        if r > r_start && out.last().is_none_or(|&l| r > l) {
            out.push(r);
        }
    };
    for st in steps {
        let (t0, t1) = (st.t0, st.t1());
        let mut prev_t = t0;
        let mut prev_v = st.start()[idx];
        for j in 1..=PROBES + 1 {
            let t = if j == PROBES + 1 { t1 } else { t0 + (t1 - t0) * j as f64 / (PROBES + 1) as f64 };
            let v = if j == PROBES + 1 { st.end()[idx] } else { st.eval(t)[idx] };
            if prev_v == 0.0 {
                push(prev_t, &mut out);
            } else if v != 0.0 && prev_v.signum() != v.signum() {
                let xtol = 4.0 * f64::EPSILON * t.abs().max(1.0);
                if let Some(root) = roots::brent(|r| st.eval(r)[idx], prev_t, t, xtol) {
                    push(root, &mut out);
                }
            }
            prev_t = t;
            prev_v = v;
        }
    }
    if let Some(st) = steps.last() {
        if st.end()[idx] == 0.0 {
            push(st.t1(), &mut out);
        }
    }
    out
}
