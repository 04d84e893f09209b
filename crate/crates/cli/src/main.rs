use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use slcert_core::bifurcator::{self, BoundaryVerdict, Classification, ClassifyOptions};
use slcert_core::catalog::{self, NamedProfile};
use slcert_core::closed_form::{iter_log, KickSpec, LogContract};
use slcert_core::kick::{self, CertifyOptions, Verdict};
use slcert_core::planar::{self, Embedding};
use slcert_core::report::{Envelope, Meta};
use slcert_core::sl_engine::{bump_on, picone_residual};
use slcert_core::surfaces::RevolutionSurface;
use slcert_core::Error;

#[derive(Parser)]
#[command(name = "slcert", version, about = "Sturm-Liouville compactness certificates for radial curvature profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Omit the timestamped `meta` block so reruns are byte-identical.
    #[arg(long)]
    no_meta: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Kick threshold: smallest positive root of cot(λ(L(b)-L(a))) = λ(L(a)-L(r0)).
    Lambda {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_radius)]
        r0: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_radius)]
        a: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_radius)]
        b: f64,
        /// Logarithm depth; 0 is the linear kick.
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Certify compactness of a profile (Ric/(n-1)) against a kick.
    Certify {
        /// Built-in name or CSV path with columns r,b.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Kick as r0,a,b,mu[,k]; defaults to the profile's own kick or the e..e² shell.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 1e6)]
        r_max: f64,
        /// Curvature hypotheses hold at every origin: bound by r1 instead of 2·r1.
        #[arg(long)]
        all_origins: bool,
        /// SL-bifurcator bounding the supremal curvature (noncompact-side test).
        #[arg(long)]
        bifurcator: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        grid_size: usize,
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Classify a profile as an SL-bifurcator; optionally test a raised comparison profile.
    Bifurcate {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 1e4)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        tail_tol: Option<f64>,
        /// Run the integrability, derivative-limit and second-solution checks.
        #[arg(long)]
        abresch: bool,
        /// Compare against profile·(1 + H·bump) on --on; runs the boundary test and Picone check.
        #[arg(long, value_name = "H")]
        exceed_by: Option<f64>,
        #[arg(long, default_value = "1:2")]
        on: String,
        #[command(flatten)]
        out: Output,
    },
    /// Curvature of a surface of revolution against geodesic radius.
    Surface {
        #[arg(long, value_enum)]
        name: SurfaceName,
        /// Write rho,z,r,K_exact,K_paper,K_r3,K_r2 rows to this CSV file.
        #[arg(long, value_name = "PATH")]
        emit_profile: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        r_lo: f64,
        #[arg(long, default_value_t = 1e3)]
        r_hi: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Also classify the profile as an SL-bifurcator up to this radius.
        #[arg(long)]
        classify_to: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Planar curves from curvature and the kicked parabola family.
    Curve {
        #[arg(long, value_enum)]
        family: CurveFamily,
        /// Parabola coefficient in y = kx².
        #[arg(long, default_value_t = planar::DEFAULT_PARABOLA_K)]
        k: f64,
        /// Sweep lo:hi:step (parabola-kick only).
        #[arg(long, allow_hyphen_values = true, default_value = "-0.2:0.2:0.05")]
        t: String,
        #[arg(long, default_value_t = planar::DEFAULT_WINDOW)]
        window: f64,
        #[arg(long, default_value_t = planar::DEFAULT_STEP)]
        step: f64,
        /// Write s,x,y,theta,kappa rows to this CSV file (parabola and circle).
        #[arg(long, value_name = "PATH")]
        emit_curve: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceName {
    CappedCylinder,
    Paraboloid,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveFamily {
    Parabola,
    ParabolaKick,
    Circle,
}

/// Failure categories mapped to exit codes.
enum Failure {
    Invalid(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::InvalidShell(_)
            | Error::InvalidInput(_)
            | Error::DomainMismatch { .. }
            | Error::DegenerateMu
            | Error::ExceedanceViolated { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

type Outcome = Result<(Envelope, String, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, result) = match cli.command {
        Command::Lambda { r0, a, b, k, ref out } => (out.clone(), cmd_lambda(r0, a, b, k)),
        Command::Certify { ref profile, n, ref spec, r_max, all_origins, ref bifurcator, tol, grid_size, margin, ref out } => (
            out.clone(),
            cmd_certify(profile, n, spec.as_deref(), r_max, all_origins, bifurcator.as_deref(), tol, grid_size, margin),
        ),
        Command::Bifurcate { ref profile, r_max, tol, tail_tol, abresch, exceed_by, ref on, ref out } => {
            (out.clone(), cmd_bifurcate(profile, r_max, tol, tail_tol, abresch, exceed_by, on))
        }
        Command::Surface { name, ref emit_profile, r_lo, r_hi, points, classify_to, ref out } => {
            (out.clone(), cmd_surface(name, emit_profile.as_deref(), r_lo, r_hi, points, classify_to))
        }
        Command::Curve { family, k, ref t, window, step, ref emit_curve, ref out } => {
            (out.clone(), cmd_curve(family, k, t, window, step, emit_curve.as_deref()))
        }
    };
    match result {
        Ok((mut env, text, conclusive)) => {
            if !out.no_meta {
                env.meta = Some(Meta::now());
            }
            let doc = env.to_json();
            if let Some(path) = &out.output {
                if let Err(e) = fs::write(path, &doc) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if out.json {
                print!("{doc}");
            } else {
                print!("{text}");
            }
            ExitCode::from(if conclusive { 0 } else { 1 })
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_profile(name: &str) -> Result<NamedProfile, Failure> {
    if catalog::BUILTIN_NAMES.contains(&name) || name == "arctan-example" {
        return Ok(catalog::builtin(name)?);
    }
    let path = Path::new(name);
    if path.exists() {
        return Ok(NamedProfile { profile: catalog::from_csv(path)?, spec: None });
    }
    Err(Failure::Invalid(format!(
        "unknown profile '{name}': not a built-in ({}) and no such file",
        catalog::BUILTIN_NAMES.join(", ")
    )))
}

/// A number, or `e` / `e^x` for powers of Euler's number.
fn parse_radius(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let e = std::f64::consts::E;
    let v = match t.strip_prefix('e') {
        Some("") => Ok(e),
        Some(rest) => match rest.strip_prefix('^') {
            Some(p) => p.parse::<f64>().map(|p| e.powf(p)),
            None => t.parse::<f64>(),
        },
        None => t.parse::<f64>(),
    };
    v.map_err(|_| format!("expected a number, e or e^x, got '{s}'"))
}

fn parse_spec(s: &str) -> Result<KickSpec, Failure> {
    let vals: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::Invalid(format!("--spec expects r0,a,b,mu[,k], got '{s}'"));
    if !(4..=5).contains(&vals.len()) {
        return Err(bad());
    }
    let num = |i: usize| parse_radius(vals[i]).map_err(|_| bad());
    let k = if vals.len() == 5 { vals[4].parse::<u32>().map_err(|_| bad())? } else { 0 };
    let spec = KickSpec { r0: num(0)?, a: num(1)?, b: num(2)?, mu: num(3)?, k };
    spec.validate()?;
    Ok(spec)
}

fn cmd_lambda(r0: f64, a: f64, b: f64, k: u32) -> Outcome {
    let lambda = kick::lambda_log(k, r0, a, b)?;
    let residual = kick::threshold_residual(k, r0, a, b, lambda)?;
    let notes = kick::discrepancy_notes(k, r0, a, b, lambda);
    let mut env = Envelope::new("lambda", "ok");
    env.lambda = Some(lambda);
    env.spec = Some(KickSpec { r0, a, b, mu: 0.0, k });
    env.tolerances = json!({ "residual_max": 1e-10 });
    env.discrepancy_notes = notes.clone();
    env = env.with_details(&json!({
        "k": k,
        "residual": residual,
        "bracket": [0.0, std::f64::consts::FRAC_PI_2 / (kick_phase(k, b)? - kick_phase(k, a)?)],
    }));
    let mut text = format!("lambda_{k}(r0={r0}, a={a}, b={b}) = {lambda:.12}\nresidual = {residual:.3e}\n");
    for n in &notes {
        text.push_str(&format!("note: {n}\n"));
    }
    Ok((env, text, true))
}

fn kick_phase(k: u32, r: f64) -> Result<f64, Failure> {
    Ok(iter_log(k + 1, r, LogContract::Defined)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    profile: &str,
    n: usize,
    spec: Option<&str>,
    r_max: f64,
    all_origins: bool,
    bif: Option<&str>,
    tol: f64,
    grid_size: usize,
    margin: f64,
) -> Outcome {
    let named = resolve_profile(profile)?;
    let spec = match spec {
        Some(s) => parse_spec(s)?,
        None => named.spec.unwrap_or_else(|| catalog::default_f0_kick().with_mu(0.0)),
    };
    let bif_profile = bif.map(resolve_profile).transpose()?.map(|p| p.profile);
    let opts = CertifyOptions {
        tol,
        grid_size,
        margin,
        all_origins,
        bifurcator: bif_profile.as_ref(),
        ..CertifyOptions::default()
    };
    let cert = kick::certify(&named.profile, n, &spec, r_max, &opts)?;
    let verdict = match cert.verdict {
        Verdict::Compact => "Compact",
        Verdict::NoncompactSide => "NoncompactSide",
        Verdict::Inconclusive => "Inconclusive",
    };
    let mut env = Envelope::new("certificate", verdict);
    env.r0 = cert.r0;
    env.r1 = cert.r1;
    env.diameter_bound = cert.diameter_bound;
    env.lambda = cert.lambda;
    env.spec = Some(cert.spec);
    env.grid_size = Some(cert.grid_size);
    env.tolerances = serde_json::to_value(cert.tolerances).expect("serializes");
    env.discrepancy_notes = cert.discrepancy_notes.clone();
    env = env.with_details(&json!({
        "profile": cert.profile,
        "n": cert.n,
        "mu_effective": cert.mu_effective,
        "all_origins": cert.all_origins,
        "reason": cert.reason,
    }));
    let mut text = format!("verdict: {verdict}\nprofile: {}\n", cert.profile);
    if let Some(l) = cert.lambda {
        text.push_str(&format!("lambda_{} = {l:.12}\n", spec.k));
    }
    if let Some(m) = cert.mu_effective {
        text.push_str(&format!("effective kick = {m:.12}\n"));
    }
    if let (Some(a), Some(b)) = (cert.r0, cert.r1) {
        text.push_str(&format!("conjugate pair: r0 = {a}, r1 = {b:.12}\n"));
    }
    if let Some(d) = cert.diameter_bound {
        text.push_str(&format!("diameter bound = {d:.12}\n"));
    }
    if let Some(r) = &cert.reason {
        text.push_str(&format!("reason: {r}\n"));
    }
    for n in &cert.discrepancy_notes {
        text.push_str(&format!("note: {n}\n"));
    }
    Ok((env, text, cert.verdict != Verdict::Inconclusive))
}

fn parse_interval(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Invalid(format!("expected lo:hi, got '{s}'"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(hi > lo) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn classification_name(c: &Classification) -> String {
    match c {
        Classification::Bifurcator => "Bifurcator".into(),
        Classification::NotBifurcator(r) => format!("NotBifurcator({})", match r {
            bifurcator::NotBifurcatorReason::SecondZero { .. } => "SecondZero",
            bifurcator::NotBifurcatorReason::NonMonotone { .. } => "NonMonotone",
            bifurcator::NotBifurcatorReason::Unbounded { .. } => "Unbounded",
        }),
        Classification::Inconclusive { .. } => "Inconclusive".into(),
    }
}

#[derive(Serialize)]
struct ComparisonDetails {
    exceed_by: f64,
    on: (f64, f64),
    boundary: bifurcator::BoundaryReport,
    picone: Option<slcert_core::sl_engine::PiconeReport>,
}

fn cmd_bifurcate(
    profile: &str,
    r_max: f64,
    tol: f64,
    tail_tol: Option<f64>,
    abresch: bool,
    exceed_by: Option<f64>,
    on: &str,
) -> Outcome {
    let b = resolve_profile(profile)?.profile;
    let opts = ClassifyOptions { tol, tail_tol, ..ClassifyOptions::default() };
    let mut report = bifurcator::classify(&b, r_max, &opts)?;
    if abresch {
        report.abresch = Some(bifurcator::abresch_checks(&b, r_max, &opts)?);
    }
    let verdict = classification_name(&report.classification);
    let mut text = format!("profile: {}\nclassification: {verdict}\n", report.profile);
    text.push_str(&format!("w(r_max) = {:.12}, w'(r_max) = {:.6e}\n", report.w_at_rmax, report.wp_at_rmax));
    if let Some(w) = report.w_limit {
        text.push_str(&format!("w_limit ~ {w:.12}\n"));
    }
    if let Some(a) = &report.abresch {
        text.push_str(&format!(
            "moment integral = {:.12} (tail ratio {:.6}, tail bound {:.3e})\nlog-log slope of |w'| = {:.6}\nindependent solution v(r_max) = {:.6e} (diverges: {})\n",
            a.moment.value, a.moment.tail_ratio, a.moment.tail_bound, a.wp_loglog_slope, a.independent.v_at_rmax, a.independent.diverges
        ));
    }
    let comparison = match exceed_by {
        None => None,
        Some(h) => {
            let (lo, hi) = parse_interval(on)?;
            let c = b.times_on(&format!("{h}*bump[{lo},{hi}]"), lo, hi, bump_on(lo, hi, h));
            let boundary = bifurcator::boundary_test(&b, &c, r_max, 10_000, &opts)?;
            let window_end = match boundary.verdict {
                BoundaryVerdict::CompactSide { r1 } => 0.9 * r1,
                BoundaryVerdict::NoEvidence { .. } => r_max,
            };
            let picone = picone_residual(&b, &c, window_end, tol).ok();
            text.push_str(&format!("comparison +{h} bump on [{lo}, {hi}]: {:?}\n", boundary.verdict));
            if let Some(p) = &picone {
                text.push_str(&format!("picone residual on [{}, {}] = {:.3e}\n", p.window.0, p.window.1, p.residual));
            }
            Some(ComparisonDetails { exceed_by: h, on: (lo, hi), boundary, picone })
        }
    };
    let mut env = Envelope::new("bifurcator", verdict);
    env.tolerances = json!({ "tol": tol, "tail_tol": report.tail_tol, "r_max": r_max });
    env = env.with_details(&json!({ "report": report, "comparison": comparison }));
    let conclusive = !matches!(report.classification, Classification::Inconclusive { .. });
    Ok((env, text, conclusive))
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    kick::log_grid(lo, hi, n)
}

fn cmd_surface(
    name: SurfaceName,
    emit: Option<&Path>,
    r_lo: f64,
    r_hi: f64,
    points: usize,
    classify_to: Option<f64>,
) -> Outcome {
    if !(r_lo > 0.0 && r_hi > r_lo) || points < 2 {
        return Err(Failure::Invalid(format!("need 0 < r_lo < r_hi and points >= 2 (got {r_lo}, {r_hi}, {points})")));
    }
    let surface = match name {
        SurfaceName::CappedCylinder => RevolutionSurface::capped_cylinder(),
        SurfaceName::Paraboloid => RevolutionSurface::paraboloid(1.0),
    };
    let rows = surface.table_rows(&log_points(r_lo, r_hi, points))?;
    if let Some(path) = emit {
        let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        for row in &rows {
            w.serialize(row).map_err(|e| Failure::Computation(e.to_string()))?;
        }
        w.flush().map_err(|e| Failure::Computation(e.to_string()))?;
    }
    let mut text = format!("surface: {}\n{:>14} {:>14} {:>14} {:>14}\n", surface.label(), "r", "K_exact", "K*r^3", "K*r^2");
    for row in rows.iter().step_by((rows.len() / 10).max(1)) {
        text.push_str(&format!("{:>14.6e} {:>14.6e} {:>14.9} {:>14.9}\n", row.r, row.k_exact, row.k_r3, row.k_r2));
    }
    let mut verdict = "ok".to_string();
    let mut classification = None;
    if let Some(r_max) = classify_to {
        let p = surface.curvature_profile()?;
        let rep = bifurcator::classify(&p, r_max, &ClassifyOptions::default())?;
        verdict = classification_name(&rep.classification);
        text.push_str(&format!("classification up to r = {r_max}: {verdict}\n"));
        classification = Some(rep);
    }
    let last = rows.last().expect("points >= 2");
    let mut env = Envelope::new("surface", verdict);
    env.grid_size = Some(rows.len());
    env.tolerances = json!({ "r_lo": r_lo, "r_hi": r_hi });
    env = env.with_details(&json!({
        "surface": surface.label(),
        "axis_curvature": surface.gauss_curvature_or_axis(0.0)?,
        "K_r3_at_r_hi": last.k_r3,
        "K_r2_at_r_hi": last.k_r2,
        "rows": rows,
        "classification": classification,
    }));
    Ok((env, text, true))
}

fn write_curve_csv(path: &Path, curve: &planar::PlanarCurve) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    for p in &curve.samples {
        w.serialize(p).map_err(|e| Failure::Computation(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::Computation(e.to_string()))
}

fn cmd_curve(family: CurveFamily, k: f64, t: &str, window: f64, step: f64, emit: Option<&Path>) -> Outcome {
    if !(window > 0.0 && step > 0.0) {
        return Err(Failure::Invalid(format!("window and step must be positive (got {window}, {step})")));
    }
    match family {
        CurveFamily::ParabolaKick => {
            let ts = planar::parse_range(t)?;
            let rep = planar::kick_family_transition(k, &ts, window, step)?;
            let verdict = match rep.bracket {
                Some(_) if rep.crossings == 1 => "SingleCrossing",
                Some(_) => "MultipleCrossings",
                None => "NoCrossing",
            };
            let mut text = format!("parabola y = {k} x^2, window [-{window}, {window}], step {step}\n");
            for e in &rep.entries {
                let verdict = match e.verdict {
                    Embedding::Embedded => "embedded",
                    Embedding::SelfIntersecting => "self-intersecting",
                    Embedding::WindowTooSmall => "window too small",
                };
                text.push_str(&format!("t = {:+.4}: {verdict}", e.t));
                if let Some((a, b)) = e.first_intersection_s_pair {
                    text.push_str(&format!(" at s = ({a:.4}, {b:.4})"));
                }
                text.push('\n');
            }
            if let Some((a, b)) = rep.bracket {
                text.push_str(&format!("transition in ({a}, {b}], crossings = {}\n", rep.crossings));
            }
            let mut env = Envelope::new("curve", verdict);
            env.tolerances = json!({ "window": window, "step": step });
            env = env.with_details(&rep);
            Ok((env, text, rep.crossings == 1))
        }
        CurveFamily::Parabola | CurveFamily::Circle => {
            let (curve, label) = match family {
                CurveFamily::Parabola => {
                    (planar::reconstruct(|s| planar::parabola_curvature(k, s), (-window, window), step)?, "parabola")
                }
                _ => (planar::reconstruct(|_| 1.0, (0.0, window), step)?, "circle"),
            };
            if let Some(path) = emit {
                write_curve_csv(path, &curve)?;
            }
            let hit = planar::self_intersects(&curve);
            let verdict = if hit.is_some() { "SelfIntersecting" } else { "Embedded" };
            let text = format!(
                "{label}: {} samples on [{}, {}], total turn {:.12}, {verdict}\n",
                curve.samples.len(),
                curve.s_range.0,
                curve.s_range.1,
                curve.total_turn()
            );
            let mut env = Envelope::new("curve", verdict);
            env.tolerances = json!({ "window": window, "step": step });
            env = env.with_details(&json!({
                "family": label,
                "k": k,
                "samples": curve.samples.len(),
                "total_turn": curve.total_turn(),
                "first_intersection_s_pair": hit,
            }));
            Ok((env, text, true))
        }
    }
}
