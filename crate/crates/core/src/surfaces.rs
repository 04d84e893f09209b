//! Surfaces of revolution `z = z(ρ)`: profile and Gaussian curvature, geodesic
//! radius from the pole, and curvature profiles in the geodesic radius.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::quadrature::{self, gl10};
use crate::roots;
use crate::sl_engine::CurvatureProfile;

/// `ρ ↦ (z, z', z'')`.
type Height = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// Cap radius used by [`RevolutionSurface::capped_cylinder`].
pub const DEFAULT_CAP: f64 = 0.05;

/// Tabulation of `r(ρ)` stops once the geodesic radius passes this value.
pub const R_TABLE_END: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMode {
    /// `K = z'z''/(ρ(1+z'²)²)`.
    Exact,
    /// Profile curvature times the circular curvature `1/ρ`.
    Printed,
}

#[derive(Debug, Clone)]
struct RadiusTable {
    rho: Vec<f64>,
    r: Vec<f64>,
}

/// The graph of `z(ρ)` rotated about the z-axis, with `z` monotone in `ρ`.
#[derive(Clone)]
pub struct RevolutionSurface {
    label: String,
    z: Height,
    /// Domain is `[0, rho_max)`.
    rho_max: f64,
    rho_breaks: Vec<f64>,
    axis_curvature: Option<f64>,
    table: Arc<OnceLock<Result<RadiusTable>>>,
}

impl std::fmt::Debug for RevolutionSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RevolutionSurface")
            .field("label", &self.label)
            .field("rho_max", &self.rho_max)
            .field("rho_breaks", &self.rho_breaks)
            .field("axis_curvature", &self.axis_curvature)
            .finish_non_exhaustive()
    }
}

impl RevolutionSurface {
    /// `axis_curvature` is the limit of `K` at the pole, `None` for a cone point.
    pub fn new<F>(label: impl Into<String>, rho_max: f64, axis_curvature: Option<f64>, z: F) -> Self
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            z: Arc::new(z),
            rho_max,
            rho_breaks: Vec::new(),
            axis_curvature,
            table: Arc::new(OnceLock::new()),
        }
    }

    /// Radii where `z''` may jump.
    pub fn with_breakpoints(mut self, mut rho: Vec<f64>) -> Self {
        rho.sort_by(f64::total_cmp);
        rho.dedup();
        self.rho_breaks = rho;
        self.table = Arc::new(OnceLock::new());
        self
    }

    pub fn capped_cylinder() -> Self {
        Self::capped_cylinder_with_cap(DEFAULT_CAP)
    }

    /// `z = 1/(1-ρ)` for `ρ ≥ ρ_c`, blended C¹ into a spherical cap on `[0, ρ_c]`.
    pub fn capped_cylinder_with_cap(rho_c: f64) -> Self {
        assert!(rho_c > 0.0 && rho_c < 1.0);
        let m = 1.0 / ((1.0 - rho_c) * (1.0 - rho_c));
        let radius = rho_c * (1.0 + m * m).sqrt() / m;
        let center = 1.0 / (1.0 - rho_c) + rho_c / m;
        Self::new("capped-cylinder", 1.0, Some(1.0 / (radius * radius)), move |rho| {
            if rho < rho_c {
                let s = (radius * radius - rho * rho).sqrt();
                [center - s, rho / s, radius * radius / (s * s * s)]
            } else {
                let d = 1.0 - rho;
                [1.0 / d, 1.0 / (d * d), 2.0 / (d * d * d)]
            }
        })
        .with_breakpoints(vec![rho_c])
    }

    /// `z = 1/(1-ρ)` all the way to the axis, where it has a cone-like kink.
    pub fn uncapped_cylinder() -> Self {
        Self::new("uncapped-cylinder", 1.0, None, |rho| {
            let d = 1.0 - rho;
            [1.0 / d, 1.0 / (d * d), 2.0 / (d * d * d)]
        })
    }

    /// `z = cρ²`.
    pub fn paraboloid(c: f64) -> Self {
        assert!(c > 0.0);
        Self::new("paraboloid", f64::INFINITY, Some(4.0 * c * c), move |rho| {
            [c * rho * rho, 2.0 * c * rho, 2.0 * c]
        })
    }

    pub fn flat_disk() -> Self {
        Self::new("flat-disk", f64::INFINITY, Some(0.0), |_| [0.0, 0.0, 0.0])
    }

    /// `z = cρ + d`; the pole is a cone point unless `c = 0`.
    pub fn cone(c: f64, d: f64) -> Self {
        let axis = if c == 0.0 { Some(0.0) } else { None };
        Self::new("cone", f64::INFINITY, axis, move |rho| [c * rho + d, c, 0.0])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if rho >= 0.0 && rho < self.rho_max {
            Ok(())
        } else {
            Err(Error::Domain(format!("rho = {rho} outside [0, {}) for {}", self.rho_max, self.label)))
        }
    }

    pub fn height(&self, rho: f64) -> Result<[f64; 3]> {
        self.check_rho(rho)?;
        Ok((self.z)(rho))
    }

    /// Curvature of the meridian, `z''/(1+z'²)^{3/2}`.
    pub fn profile_curvature(&self, rho: f64) -> Result<f64> {
        let [_, zp, zpp] = self.height(rho)?;
        Ok(zpp / (1.0 + zp * zp).powf(1.5))
    }

    /// Gaussian curvature at `ρ > 0`.
    pub fn gauss_curvature(&self, rho: f64, mode: CurvatureMode) -> Result<f64> {
        if rho == 0.0 {
            return Err(Error::Domain(format!("rho = 0 is the axis of {}; use the pole limit", self.label)));
        }
        let [_, zp, zpp] = self.height(rho)?;
        let q = 1.0 + zp * zp;
        Ok(match mode {
            CurvatureMode::Exact => (zp / rho) * zpp / (q * q),
            CurvatureMode::Printed => zpp / (rho * q.powf(1.5)),
        })
    }

    /// Exact Gaussian curvature, with the pole limit at `ρ = 0`.
    pub fn gauss_curvature_or_axis(&self, rho: f64) -> Result<f64> {
        if rho == 0.0 {
            self.axis_curvature
                .ok_or_else(|| Error::Domain(format!("{} has no smooth pole", self.label)))
        } else {
            self.gauss_curvature(rho, CurvatureMode::Exact)
        }
    }

    // √(1+z'²) - |z'|, the part of the arclength density left after telescoping z.
    fn excess_density(&self, u: f64) -> f64 {
        let zp = (self.z)(u)[1].abs();
        1.0 / ((1.0 + zp * zp).sqrt() + zp)
    }

    // Uniform panels up to the last breakpoint (and ρ = 1 on unbounded
    // domains); the geometric tail is appended by `build_table`.
    fn panel_nodes(&self) -> Vec<f64> {
        let mut fixed = vec![0.0];
        fixed.extend(self.rho_breaks.iter().copied().filter(|&x| x > 0.0 && x < self.rho_max));
        if !self.rho_max.is_finite() && *fixed.last().unwrap() < 1.0 {
            fixed.push(1.0);
        }
        let mut nodes = Vec::new();
        for w in fixed.windows(2) {
            nodes.extend((0..8).map(|j| w[0] + (w[1] - w[0]) * j as f64 / 8.0));
        }
        nodes.push(*fixed.last().unwrap());
        nodes
    }

    fn table(&self) -> Result<&RadiusTable> {
        self.table
            .get_or_init(|| self.build_table())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_table(&self) -> Result<RadiusTable> {
        let mut rho = self.panel_nodes();
        let start = *rho.last().unwrap();
        let mut r = vec![0.0];
        let mut sign = 0.0;
        let mut push_panel = |lo: f64, hi: f64, r: &mut Vec<f64>| -> Result<f64> {
            for (u, _) in gl10().mapped(lo, hi) {
                let s = (self.z)(u)[1].signum();
                if s != 0.0 {
                    if sign == 0.0 {
                        sign = s;
                    } else if s != sign {
                        return Err(Error::Domain(format!("{}: z is not monotone near rho = {u}", self.label)));
                    }
                }
            }
            let q = quadrature::adaptive(|u| self.excess_density(u), lo, hi, 1e-17, 1e-14, 200);
            if !q.converged {
                return Err(Error::QuadratureNotConverged { lo, hi, estimate: q.abs_error });
            }
            let dz = ((self.z)(hi)[0] - (self.z)(lo)[0]).abs();
            let next = r.last().unwrap() + dz + q.value;
            r.push(next);
            Ok(next)
        };
        for j in 1..rho.len() {
            push_panel(rho[j - 1], rho[j], &mut r)?;
        }
        let mut cur = start;
        loop {
            let next = if self.rho_max.is_finite() {
                self.rho_max - 0.9 * (self.rho_max - cur)
            } else {
                1.1 * cur
            };
            if !(next > cur && next < self.rho_max) {
                break;
            }
            let rr = push_panel(cur, next, &mut r)?;
            rho.push(next);
            cur = next;
            if rr >= R_TABLE_END {
                break;
            }
        }
        Ok(RadiusTable { rho, r })
    }

    /// Largest geodesic radius covered by the inversion table.
    pub fn r_domain_end(&self) -> Result<f64> {
        Ok(*self.table()?.r.last().unwrap())
    }

    fn partial_radius(&self, t: &RadiusTable, j: usize, rho: f64) -> f64 {
        let lo = t.rho[j];
        let dz = ((self.z)(rho)[0] - (self.z)(lo)[0]).abs();
        t.r[j] + dz + gl10().integrate(lo, rho, |u| self.excess_density(u))
    }

    /// Geodesic distance from the pole along a meridian, `∫₀^ρ √(1+z'²)`.
    pub fn geodesic_radius(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let t = self.table()?;
        if rho > *t.rho.last().unwrap() {
            return Err(Error::Domain(format!("rho = {rho} beyond the tabulated range of {}", self.label)));
        }
        let j = t.rho.partition_point(|&x| x <= rho).clamp(1, t.rho.len()) - 1;
        Ok(self.partial_radius(t, j, rho))
    }

    /// Inverse of [`geodesic_radius`](Self::geodesic_radius).
    pub fn rho_of_r(&self, r: f64) -> Result<f64> {
        let t = self.table()?;
        let end = *t.r.last().unwrap();
        if !(r >= 0.0 && r <= end) {
            return Err(Error::Domain(format!("r = {r} outside [0, {end}] for {}", self.label)));
        }
        let j = t.r.partition_point(|&x| x <= r).clamp(1, t.r.len() - 1) - 1;
        let (lo, hi) = (t.rho[j], t.rho[j + 1]);
        roots::brent(|rho| self.partial_radius(t, j, rho) - r, lo, hi, 2.0 * f64::EPSILON * hi)
            .ok_or_else(|| Error::Domain(format!("could not invert r = {r} on [{lo}, {hi}]")))
    }

    /// Exact Gaussian curvature as a function of geodesic radius, by inversion of `r(ρ)`.
    pub fn curvature_at_r(&self, r: f64) -> Result<f64> {
        let rho = self.rho_of_r(r)?;
        self.gauss_curvature_or_axis(rho)
    }

    fn r_breakpoints(&self) -> Result<Vec<f64>> {
        self.rho_breaks
            .iter()
            .filter(|&&x| x > 0.0 && x < self.rho_max)
            .map(|&x| self.geodesic_radius(x))
            .collect()
    }

    /// `r ↦ K(ρ(r))`, the Jacobi coefficient along meridians, by exact inversion.
    pub fn curvature_profile(&self) -> Result<CurvatureProfile> {
        let end = self.r_domain_end()?;
        if self.axis_curvature.is_none() {
            return Err(Error::Domain(format!("{} has no smooth pole", self.label)));
        }
        let bps = self.r_breakpoints()?;
        let s = self.clone();
        Ok(CurvatureProfile::new(self.label.clone(), 0.0, move |r| s.curvature_at_r(r).unwrap_or(f64::NAN))
            .with_domain_end(end)
            .with_breakpoints(bps))
    }

    /// Exact curvature tabulated on `r_grid` and interpolated with a monotone
    /// cubic, split at the surface's breakpoints.
    pub fn curvature_profile_tabulated(&self, r_grid: &[f64]) -> Result<CurvatureProfile> {
        let bps = self.r_breakpoints()?;
        let mut grid: Vec<f64> = r_grid.to_vec();
        grid.extend_from_slice(&bps);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let (lo, hi) = match (grid.first(), grid.last()) {
            (Some(&lo), Some(&hi)) if hi > lo => (lo, hi),
            _ => return Err(Error::InvalidInput("r_grid needs two distinct radii".into())),
        };
        let mut edges = vec![lo];
        edges.extend(bps.iter().copied().filter(|&x| x > lo && x < hi));
        edges.push(hi);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let xs: Vec<f64> = grid.iter().copied().filter(|&x| x >= w[0] && x <= w[1]).collect();
            let ys = xs
                .iter()
                .map(|&x| {
                    // One-sided value at the piece's own ends.
                    let xi = x.clamp(w[0].next_up(), w[1].next_down());
                    self.curvature_at_r(if x == 0.0 { 0.0 } else { xi })
                })
                .collect::<Result<Vec<f64>>>()?;
            pieces.push((w[0], w[1], Pchip::new(xs, ys)?));
        }
        let label = format!("{}[pchip,{}]", self.label, grid.len());
        Ok(CurvatureProfile::new(label, lo, move |r| {
            let i = pieces.partition_point(|p| p.1 < r).min(pieces.len() - 1);
            pieces[i].2.eval(r)
        })
        .with_domain_end(hi)
        .with_breakpoints(bps))
    }

    /// Rows of the CSV export at the given geodesic radii (`r > 0`).
    pub fn table_rows(&self, r_grid: &[f64]) -> Result<Vec<SurfaceRow>> {
        r_grid
            .iter()
            .map(|&r| {
                if !(r > 0.0) {
                    return Err(Error::InvalidInput(format!("table radius {r} must be positive")));
                }
                let rho = self.rho_of_r(r)?;
                let k_exact = self.gauss_curvature(rho, CurvatureMode::Exact)?;
                Ok(SurfaceRow {
                    rho,
                    z: self.height(rho)?[0],
                    r,
                    k_exact,
                    k_printed: self.gauss_curvature(rho, CurvatureMode::Printed)?,
                    k_r3: k_exact * r * r * r,
                    k_r2: k_exact * r * r,
                })
            })
            .collect()
    }
}

/// One CSV row; column names are frozen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub rho: f64,
    pub z: f64,
    pub r: f64,
    #[serde(rename = "K_exact")]
    pub k_exact: f64,
    #[serde(rename = "K_paper")]
    pub k_printed: f64,
    #[serde(rename = "K_r3")]
    pub k_r3: f64,
    #[serde(rename = "K_r2")]
    pub k_r2: f64,
}
