use std::fmt;
use std::sync::Arc;

type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial curvature function `r ↦ b(r)` on `[r_min, r_max]`.
///
/// This is the coefficient of `w'' + b(r) w = 0`. Profiles are immutable and
/// cheap to clone; composition helpers build new profiles on top of old ones.
/// `breakpoints` lists radii where `b` may jump; the integrator never steps
/// across them and evaluates one-sided limits on each piece.
#[derive(Clone)]
pub struct CurvatureProfile {
    eval: Coefficient,
    r_min: f64,
    r_max: f64,
    label: String,
    breakpoints: Vec<f64>,
}

impl CurvatureProfile {
    pub fn new<F>(label: impl Into<String>, r_min: f64, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            r_min,
            r_max: f64::INFINITY,
            label: label.into(),
            breakpoints: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), 0.0, move |_| c)
    }

    pub fn with_breakpoints(mut self, mut bps: Vec<f64>) -> Self {
        bps.retain(|x| x.is_finite());
        bps.extend_from_slice(&self.breakpoints);
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        self.breakpoints = bps;
        self
    }

    pub fn with_domain_end(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Breakpoints strictly inside `(lo, hi)`.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.iter().copied().filter(move |&x| x > lo && x < hi)
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.r_min && hi <= self.r_max
    }

    /// Whether `b(0)` is defined and finite, so integrations may start at the origin.
    pub fn finite_at_origin(&self) -> bool {
        self.r_min <= 0.0 && self.eval(0.0).is_finite()
    }

    /// `c · b(r)`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |r| c * inner(r)),
            label: format!("{c}*{}", self.label),
            ..self.clone()
        }
    }

    /// `b(r) + g(r)` where `g` is supported on `[lo, hi]`; adds `lo, hi` as breakpoints.
    pub fn plus_on<G>(&self, label: &str, lo: f64, hi: f64, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |r| {
                let base = inner(r);
                if (lo..=hi).contains(&r) {
                    base + g(r)
                } else {
                    base
                }
            }),
            label: format!("{}+{label}", self.label),
            ..self.clone()
        }
        .with_breakpoints(vec![lo, hi])
    }

    /// `b(r)·(1 + g(r))` where `g` is supported on `[lo, hi]`.
    pub fn times_on<G>(&self, label: &str, lo: f64, hi: f64, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |r| {
                let base = inner(r);
                if (lo..=hi).contains(&r) {
                    base * (1.0 + g(r))
                } else {
                    base
                }
            }),
            label: format!("{}*(1+{label})", self.label),
            ..self.clone()
        }
        .with_breakpoints(vec![lo, hi])
    }
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvatureProfile")
            .field("label", &self.label)
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

/// Smooth standard mollifier `exp(1 - 1/(1 - x²))` on (-1, 1), peak 1 at 0.
pub fn mollifier(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Mollifier rescaled onto `[lo, hi]` with peak height `height`.
pub fn bump_on(lo: f64, hi: f64, height: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    move |r| height * mollifier((r - mid) / half)
}
