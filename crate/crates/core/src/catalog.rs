//! Named curvature profiles shipped with the toolkit.

use crate::closed_form::{f_k, superpower, KickSpec};
use crate::error::{Error, Result};
use crate::kick::lambda_log;
use crate::sl_engine::{bump_on, CurvatureProfile};
use crate::surfaces::RevolutionSurface;

/// `b(r) = 2r / ((1+r²)² arctan r)`, solved by `w = arctan r`.
pub fn arctan_bifurcator() -> CurvatureProfile {
    CurvatureProfile::new("arctan-bifurcator", 0.0, |r: f64| {
        let q = 1.0 + r * r;
        if r.abs() < 1e-3 {
            // r/arctan r = 1 + r²/3 - 4r⁴/45 + O(r⁶)
            let r2 = r * r;
            2.0 * (1.0 + r2 / 3.0 - 4.0 * r2 * r2 / 45.0) / (q * q)
        } else {
            2.0 * r / (q * q * r.atan())
        }
    })
}

/// The arctan bifurcator raised by `height·mollifier` on `[lo, hi]`, multiplicatively.
pub fn arctan_with_bump(height: f64, lo: f64, hi: f64) -> CurvatureProfile {
    let bump = bump_on(lo, hi, height);
    arctan_bifurcator().times_on(&format!("{height}*bump[{lo},{hi}]"), lo, hi, bump)
}

/// `F_k(r, 0)`, the critical decay profile with no kick.
pub fn equality_profile(k: u32) -> CurvatureProfile {
    CurvatureProfile::new(format!("bf-equality(k={k})"), superpower(k), move |r| {
        f_k(r, 0.0, k).unwrap_or(f64::NAN)
    })
}

/// Linear kick on the shell `[e, e²]` with amplitude `1.1·λ`.
pub fn default_f0_kick() -> KickSpec {
    let (a, b) = (std::f64::consts::E, std::f64::consts::E.powi(2));
    let lam = lambda_log(0, 1.0, a, b).expect("valid shell");
    KickSpec::linear(1.0, a, b, 1.1 * lam)
}

/// Log kick with `k = 1` on `[3, 9]` from `r0 = 2`, amplitude `1.5·λ_1`.
pub fn default_fk_kick() -> KickSpec {
    let (r0, a, b) = (2.0, 3.0, 9.0);
    let lam = lambda_log(1, r0, a, b).expect("valid shell");
    KickSpec { r0, a, b, mu: 1.5 * lam, k: 1 }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "f0-kick",
    "fk-kick",
    "bf-equality",
    "arctan-bifurcator",
    "capped-cylinder",
    "paraboloid",
];

/// A built-in profile and, for kicked families, the kick it carries.
#[derive(Clone)]
pub struct NamedProfile {
    pub profile: CurvatureProfile,
    pub spec: Option<KickSpec>,
}

/// Resolve a built-in name (`arctan-example` is accepted as an alias).
pub fn builtin(name: &str) -> Result<NamedProfile> {
    let plain = |profile| Ok(NamedProfile { profile, spec: None });
    match name {
        "f0-kick" => {
            let spec = default_f0_kick();
            Ok(NamedProfile { profile: spec.profile().with_label("f0-kick"), spec: Some(spec) })
        }
        "fk-kick" => {
            let spec = default_fk_kick();
            Ok(NamedProfile { profile: spec.profile().with_label("fk-kick"), spec: Some(spec) })
        }
        "bf-equality" => plain(equality_profile(0).with_label("bf-equality")),
        "arctan-bifurcator" | "arctan-example" => plain(arctan_bifurcator()),
        "capped-cylinder" => plain(RevolutionSurface::capped_cylinder().curvature_profile()?),
        "paraboloid" => plain(RevolutionSurface::paraboloid(1.0).curvature_profile()?),
        other => Err(Error::InvalidInput(format!(
            "unknown profile '{other}'; built-ins are {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// Tabulated profile from CSV columns `r,b`, linearly interpolated.
///
/// Outside the table the profile is undefined (`r_min`/`r_max` are the first
/// and last radii), so integrations past the table fail with `DomainMismatch`.
pub fn from_csv(path: &std::path::Path) -> Result<CurvatureProfile> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        let row = rec.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::InvalidInput(format!("{}: need at least two rows", path.display())));
    }
    if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidInput(format!("{}: radii must increase strictly", path.display())));
    }
    if rows.iter().any(|&(r, b)| !r.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidInput(format!("{}: non-finite entry", path.display())));
    }
    let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
    let label = format!("csv:{}", path.display());
    Ok(CurvatureProfile::new(label, lo, move |r| {
        let i = rows.partition_point(|p| p.0 <= r).clamp(1, rows.len() - 1);
        let (r0, b0) = rows[i - 1];
        let (r1, b1) = rows[i];
        b0 + (b1 - b0) * (r - r0) / (r1 - r0)
    })
    .with_domain_end(hi))
}
