//! Planar curves from curvature: θ-first reconstruction, the parabola's
//! arclength curvature, self-intersection, and the kicked parabola family.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::predicates::segments_intersect;
use crate::quadrature::gl10;
use crate::sl_engine::bump_on;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa: f64,
}

/// Arclength-parameterised polyline with turning angle and curvature samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarCurve {
    pub samples: Vec<CurveSample>,
    pub s_range: (f64, f64),
}

impl PlanarCurve {
    pub fn total_turn(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.theta - a.theta,
            _ => 0.0,
        }
    }

    pub fn point_at(&self, i: usize) -> [f64; 2] {
        [self.samples[i].x, self.samples[i].y]
    }

    /// Sample nearest to arclength `s`.
    pub fn nearest(&self, s: f64) -> &CurveSample {
        let i = self.samples.partition_point(|p| p.s < s).min(self.samples.len() - 1);
        if i > 0 && (self.samples[i - 1].s - s).abs() < (self.samples[i].s - s).abs() {
            &self.samples[i - 1]
        } else {
            &self.samples[i]
        }
    }
}

/// Position and tangent angle at the anchor arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Frame {
    /// `C(s) = (0, 0)`, `C'(s) = (1, 0)`.
    pub fn standard_at(s: f64) -> Self {
        Self { s, x: 0.0, y: 0.0, theta: 0.0 }
    }
}

/// Reconstruct with `C(0) = 0`, `C'(0) = (1, 0)` when `0 ∈ s_range`, else at `s_range.0`.
pub fn reconstruct<K: Fn(f64) -> f64>(kappa: K, s_range: (f64, f64), step: f64) -> Result<PlanarCurve> {
    let anchor = if s_range.0 <= 0.0 && 0.0 <= s_range.1 { 0.0 } else { s_range.0 };
    reconstruct_with_frame(kappa, s_range, step, Frame::standard_at(anchor))
}

/// θ-first reconstruction: `θ = θ0 + ∫κ`, then `(x, y) = ∫(cos θ, sin θ)`, both by
/// 10-point Gauss–Legendre per grid cell. θ at the inner nodes comes from the
/// exact integral of the cell's κ interpolant.
pub fn reconstruct_with_frame<K: Fn(f64) -> f64>(
    kappa: K,
    s_range: (f64, f64),
    step: f64,
    frame: Frame,
) -> Result<PlanarCurve> {
    let (lo, hi) = s_range;
    if !(hi > lo) || !(step > 0.0) || !(frame.s >= lo && frame.s <= hi) {
        return Err(Error::InvalidInput(format!(
            "need lo < hi, step > 0 and anchor inside: range ({lo}, {hi}), step {step}, anchor {}",
            frame.s
        )));
    }
    let rule = gl10();
    let spectral = node_integrals();
    let mut bad = None;
    let k = |s: f64, bad: &mut Option<f64>| {
        let v = kappa(s);
        if !v.is_finite() && bad.is_none() {
            *bad = Some(s);
        }
        v
    };
    let sweep = |to: f64, bad: &mut Option<f64>| -> Vec<CurveSample> {
        let n = ((to - frame.s).abs() / step).ceil() as usize;
        let mut out = Vec::with_capacity(n);
        let mut cur = CurveSample { s: frame.s, x: frame.x, y: frame.y, theta: frame.theta, kappa: 0.0 };
        let mut kv = [0.0; 10];
        for j in 1..=n {
            let s1 = if j == n { to } else { frame.s + (to - frame.s) * j as f64 / n as f64 };
            let (s0, th0) = (cur.s, cur.theta);
            let half = 0.5 * (s1 - s0);
            let mid = 0.5 * (s0 + s1);
            for (slot, node) in kv.iter_mut().zip(&rule.nodes) {
                *slot = k(mid + half * node, bad);
            }
            // θ at each node from the degree-9 interpolant of κ on the cell.
            let (mut dx, mut dy, mut dth) = (0.0, 0.0, 0.0);
            for (i, w) in rule.weights.iter().enumerate() {
                let th = th0 + half * spectral[i].iter().zip(&kv).map(|(a, b)| a * b).sum::<f64>();
                dx += w * th.cos();
                dy += w * th.sin();
                dth += w * kv[i];
            }
            cur = CurveSample {
                s: s1,
                x: cur.x + half * dx,
                y: cur.y + half * dy,
                theta: th0 + half * dth,
                kappa: k(s1, bad),
            };
            out.push(cur);
        }
        out
    };
    let mut left = sweep(lo, &mut bad);
    let right = sweep(hi, &mut bad);
    left.reverse();
    let mut samples = left;
    samples.push(CurveSample { s: frame.s, x: frame.x, y: frame.y, theta: frame.theta, kappa: k(frame.s, &mut bad) });
    samples.extend(right);
    if let Some(s) = bad {
        return Err(Error::NonFiniteCoefficient { r: s });
    }
    Ok(PlanarCurve { samples, s_range })
}

/// `S[i][j] = ∫_{-1}^{x_i} ℓ_j`, with `ℓ_j` the Lagrange basis on the 10 Gauss nodes.
fn node_integrals() -> &'static [[f64; 10]; 10] {
    static CELL: OnceLock<[[f64; 10]; 10]> = OnceLock::new();
    CELL.get_or_init(|| {
        let rule = gl10();
        let x = &rule.nodes;
        let basis = |j: usize, t: f64| {
            (0..10).filter(|&m| m != j).map(|m| (t - x[m]) / (x[j] - x[m])).product::<f64>()
        };
        let mut s = [[0.0; 10]; 10];
        for (i, row) in s.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                // Degree 9 integrand: the 10-point rule is exact.
                *v = rule.integrate(-1.0, x[i], |t| basis(j, t));
            }
        }
        s
    })
}

/// Arclength from the vertex of `y = kx²` to abscissa `x`.
pub fn parabola_arclength(k: f64, x: f64) -> f64 {
    let q = 2.0 * k * x;
    0.5 * (x * (1.0 + q * q).sqrt() + q.asinh() / (2.0 * k))
}

/// Abscissa at arclength `s ≥ 0`, by safeguarded Newton on the monotone map `x ↦ s(x)`.
pub fn parabola_x_of_s(k: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, s);
    let mut x = s.min((s / k).sqrt());
    for _ in 0..100 {
        let f = parabola_arclength(k, x) - s;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let q = 2.0 * k * x;
        let mut next = x - f / (1.0 + q * q).sqrt();
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * next.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Curvature of `y = kx²` at arclength `s` from the vertex; even in `s`.
pub fn parabola_curvature(k: f64, s: f64) -> f64 {
    let x = parabola_x_of_s(k, s.abs());
    let q = 2.0 * k * x;
    2.0 * k / (1.0 + q * q).powf(1.5)
}

/// First pair of non-adjacent segments that meet, as `(s_i, s_j)` segment starts, `i < j`.
///
/// Segments are bucketed in a uniform hash grid; candidates are decided with the
/// exact orientation predicate. "First" means smallest `j`, then smallest `i`.
pub fn self_intersects(curve: &PlanarCurve) -> Option<(f64, f64)> {
    let n = curve.samples.len();
    if n < 3 {
        return None;
    }
    let seg = |i: usize| (curve.point_at(i), curve.point_at(i + 1));
    let mut cell: f64 = 0.0;
    for i in 0..n - 1 {
        let (a, b) = seg(i);
        cell = cell.max((b[0] - a[0]).abs()).max((b[1] - a[1]).abs());
    }
    if !(cell > 0.0) {
        return None;
    }
    let key = |v: f64| (v / cell).floor() as i64;
    let cells_of = |i: usize| {
        let (a, b) = seg(i);
        let (x0, x1) = (key(a[0].min(b[0])), key(a[0].max(b[0])));
        let (y0, y1) = (key(a[1].min(b[1])), key(a[1].max(b[1])));
        (x0..=x1).flat_map(move |cx| (y0..=y1).map(move |cy| (cx, cy)))
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for j in 0..n - 1 {
        let (q1, q2) = seg(j);
        let mut best: Option<usize> = None;
        for c in cells_of(j) {
            if let Some(list) = grid.get(&c) {
                for &i in list {
                    if i + 1 < j && best.is_none_or(|b| i < b) {
                        let (p1, p2) = seg(i);
                        if segments_intersect(p1, p2, q1, q2) {
                            best = Some(i);
                        }
                    }
                }
            }
        }
        if let Some(i) = best {
            return Some((curve.samples[i].s, curve.samples[j].s));
        }
        for c in cells_of(j) {
            grid.entry(c).or_default().push(j);
        }
    }
    None
}

pub const DEFAULT_PARABOLA_K: f64 = 20.0;
pub const DEFAULT_WINDOW: f64 = 100.0;
pub const DEFAULT_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    Embedded,
    SelfIntersecting,
    WindowTooSmall,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionEntry {
    pub t: f64,
    pub verdict: Embedding,
    pub first_intersection_s_pair: Option<(f64, f64)>,
    /// `max(|s_i|, |s_j|)`: the window at which the crossing first shows.
    pub appears_at_window: Option<f64>,
    pub total_turn: f64,
    pub window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub k: f64,
    pub window: f64,
    pub step: f64,
    pub entries: Vec<TransitionEntry>,
    /// Number of embedded → self-intersecting changes as `t` increases.
    pub crossings: usize,
    /// `(t_embedded, t_intersecting)` around the first change.
    pub bracket: Option<(f64, f64)>,
}

/// `κ_t(s) = κ_P(|s|) + t·β(s)` with the standard mollifier `β` on `[-1, 1]`.
pub fn kicked_parabola_curvature(k: f64, t: f64) -> impl Fn(f64) -> f64 {
    let beta = bump_on(-1.0, 1.0, 1.0);
    move |s| parabola_curvature(k, s) + t * beta(s)
}

/// One member of the family on `[-S, S]`, anchored at the vertex.
pub fn kick_family_member(k: f64, t: f64, window: f64, step: f64) -> Result<TransitionEntry> {
    let curve = reconstruct(kicked_parabola_curvature(k, t), (-window, window), step)?;
    let total_turn = curve.total_turn();
    let hit = self_intersects(&curve);
    let verdict = match hit {
        Some(_) => Embedding::SelfIntersecting,
        None if t > 0.0 && total_turn < std::f64::consts::PI => {
            return Err(Error::WindowTooSmall { t, window, total_turn });
        }
        None => Embedding::Embedded,
    };
    Ok(TransitionEntry {
        t,
        verdict,
        first_intersection_s_pair: hit,
        appears_at_window: hit.map(|(a, b)| a.abs().max(b.abs())),
        total_turn,
        window,
    })
}

/// Sweep `t_values` in increasing order and locate the embedded/non-embedded change.
pub fn kick_family_transition(k: f64, t_values: &[f64], window: f64, step: f64) -> Result<TransitionReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("parabola coefficient k = {k} must be positive")));
    }
    let mut ts = t_values.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut entries = Vec::with_capacity(ts.len());
    for &t in &ts {
        let entry = match kick_family_member(k, t, window, step) {
            Ok(e) => e,
            Err(Error::WindowTooSmall { total_turn, .. }) => TransitionEntry {
                t,
                verdict: Embedding::WindowTooSmall,
                first_intersection_s_pair: None,
                appears_at_window: None,
                total_turn,
                window,
            },
            Err(e) => return Err(e),
        };
        entries.push(entry);
    }
    let mut crossings = 0;
    let mut bracket = None;
    for w in entries.windows(2) {
        if w[0].verdict == Embedding::Embedded && w[1].verdict == Embedding::SelfIntersecting {
            crossings += 1;
            bracket.get_or_insert((w[0].t, w[1].t));
        }
    }
    Ok(TransitionReport { k, window, step, entries, crossings, bracket })
}

/// Parse `lo:hi:step` into an inclusive grid, snapping to multiples of `step` from `lo`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidInput(format!("expected lo:hi:step, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|j| {
        let v = lo + step * j as f64;
        // Keep 0 exact and tame representation noise like 0.15000000000000002.
        let rounded = (v / step).round() * step;
        if (rounded - v).abs() < 1e-9 * step { (rounded * 1e12).round() / 1e12 } else { v }
    }).collect())
}
