//! Gauge (comparison) functions on the half-line and their limit
//! calculus.
//!
//! A gauge `phi` is *normal* when `phi(0) = 0` and `phi(t) < t` for
//! `t > 0`. The stronger classes bound the one-sided and symmetric
//! limsups: *right-limit-normal* demands `limsup_{t->s+} phi(t) < s`
//! and *limit-normal* the same for the two-sided limsup. The residual
//! `psi(t) = t - phi(t)` is *semi-coercive* when
//! `liminf_{t->inf} psi(t) > 0`.
//!
//! All limit quantities here are grid estimators: the limsup at `s` is
//! the infimum over a shrinking family of windows of sampled suprema,
//! and the classification verdicts are grid-certified, not pointwise
//! proofs. Closed-form families (linear, rational, exp-saturating) are
//! exact enough on these grids for the estimators to match analytic
//! values.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Evaluation closure for user-defined gauges.
pub type GaugeFn = Arc<dyn Fn(f64) -> Result<f64, GaugeError> + Send + Sync>;

/// A comparison function `phi` on `R+`.
#[derive(Clone)]
pub enum Gauge {
    /// `phi(t) = alpha t`.
    Linear(f64),
    /// `phi(t) = t / (1 + t)`.
    Rational,
    /// `phi(t) = t (1 - exp(-t))`; normal but not semi-coercive.
    ExpSaturating,
    /// A user-supplied evaluation map (e.g. a parsed expression).
    Custom { name: String, f: GaugeFn },
}

impl core::fmt::Debug for Gauge {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Gauge::Linear(a) => write!(f, "Linear({a})"),
            Gauge::Rational => write!(f, "Rational"),
            Gauge::ExpSaturating => write!(f, "ExpSaturating"),
            Gauge::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GaugeError {
    NegativeArgument { t: f64 },
    /// The evaluation point `s` of a right/symmetric limsup must be
    /// strictly positive.
    NonPositivePoint { s: f64 },
    /// A user expression is undefined at the requested argument.
    ExpressionDomain { detail: String },
    EmptyPrefix,
    BadGrid { detail: String },
}

impl core::fmt::Display for GaugeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GaugeError::NegativeArgument { t } => write!(f, "gauge argument {t} is negative"),
            GaugeError::NonPositivePoint { s } => {
                write!(f, "limit point {s} must be strictly positive")
            }
            GaugeError::ExpressionDomain { detail } => {
                write!(f, "expression domain error: {detail}")
            }
            GaugeError::EmptyPrefix => write!(f, "sequence prefix is empty"),
            GaugeError::BadGrid { detail } => write!(f, "bad grid: {detail}"),
        }
    }
}

impl core::error::Error for GaugeError {}

impl Gauge {
    /// Evaluate `phi(t)` for `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64, GaugeError> {
        if t < 0.0 || !t.is_finite() {
            return Err(GaugeError::NegativeArgument { t });
        }
        match self {
            Gauge::Linear(alpha) => Ok(alpha * t),
            Gauge::Rational => Ok(t / (1.0 + t)),
            Gauge::ExpSaturating => Ok(t * (1.0 - libm::exp(-t))),
            Gauge::Custom { f, .. } => f(t),
        }
    }

    /// The residual `psi(t) = t - phi(t)`, computed in closed form for
    /// the builtin families. The subtraction `t - phi(t)` cancels
    /// catastrophically when `phi(t)` saturates toward `t` (the
    /// exp-saturating family already rounds to `t` near `t = 37`), so
    /// the families carry their own residual formula.
    pub fn psi(&self, t: f64) -> Result<f64, GaugeError> {
        if t < 0.0 || !t.is_finite() {
            return Err(GaugeError::NegativeArgument { t });
        }
        match self {
            Gauge::Linear(alpha) => Ok((1.0 - alpha) * t),
            Gauge::Rational => Ok(t * t / (1.0 + t)),
            Gauge::ExpSaturating => Ok(t * libm::exp(-t)),
            Gauge::Custom { f, .. } => Ok(t - f(t)?),
        }
    }

    /// Analytic classification flags for the closed-form families:
    /// `(normal, right_limit_normal, limit_normal)`. `None` for user
    /// expressions, whose classes are grid-estimated only.
    pub fn analytic_classes(&self) -> Option<(bool, bool, bool)> {
        match self {
            // alpha*t < t iff alpha < 1; continuity gives the limit classes.
            Gauge::Linear(alpha) => {
                let ok = (0.0..1.0).contains(alpha);
                Some((ok, ok, ok))
            }
            // t/(1+t) and t(1-exp(-t)) are continuous with phi(t) < t on (0, inf).
            Gauge::Rational | Gauge::ExpSaturating => Some((true, true, true)),
            Gauge::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Gauge::Linear(a) => alloc::format!("linear:{a}"),
            Gauge::Rational => String::from("rational"),
            Gauge::ExpSaturating => String::from("expsat"),
            Gauge::Custom { name, .. } => alloc::format!("expr:{name}"),
        }
    }
}

/// Sampling plan for the window suprema `Phi[s+](eps)` / `Phi[s](eps)`:
/// `eps` is halved `halvings` times from `eps0`, with `samples` points
/// per window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimsupGrid {
    pub eps0: f64,
    pub halvings: usize,
    pub samples: usize,
}

impl Default for LimsupGrid {
    fn default() -> Self {
        LimsupGrid {
            eps0: 1.0,
            halvings: 20,
            samples: 64,
        }
    }
}

impl LimsupGrid {
    fn validate(&self) -> Result<(), GaugeError> {
        if self.eps0 > 0.0 && self.samples >= 2 {
            Ok(())
        } else {
            Err(GaugeError::BadGrid {
                detail: alloc::format!("eps0 = {}, samples = {}", self.eps0, self.samples),
            })
        }
    }
}

/// A grid estimate of a limit quantity together with its monotone
/// trace of successive window values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LimitEstimate {
    pub value: f64,
    /// Window widths (for limsups) or tail starts (for the liminf).
    pub grid: Vec<f64>,
    /// Running inf of sampled suprema (limsup) or running sup of
    /// sampled infima (liminf); monotone by construction.
    pub trace: Vec<f64>,
}

/// Estimate `limsup_{t->s+} phi(t) = inf_{eps>0} sup{phi(t); s <= t < s+eps}`.
pub fn limsup_right(g: &Gauge, s: f64, grid: &LimsupGrid) -> Result<LimitEstimate, GaugeError> {
    if !(s > 0.0) {
        return Err(GaugeError::NonPositivePoint { s });
    }
    grid.validate()?;
    window_limsup(g, s, grid, false)
}

/// Estimate the symmetric `limsup_{t->s} phi(t)` over windows
/// `(s-eps, s+eps)` clipped to the gauge's domain `[0, inf)`.
pub fn limsup_sym(g: &Gauge, s: f64, grid: &LimsupGrid) -> Result<LimitEstimate, GaugeError> {
    if !(s > 0.0) {
        return Err(GaugeError::NonPositivePoint { s });
    }
    grid.validate()?;
    window_limsup(g, s, grid, true)
}

/// Width of the smallest window the halving schedule reaches at `s`.
fn grid_resolution(grid: &LimsupGrid, s: f64) -> f64 {
    grid.eps0.min(s) * libm::pow(0.5, grid.halvings as f64)
}

fn window_limsup(
    g: &Gauge,
    s: f64,
    grid: &LimsupGrid,
    symmetric: bool,
) -> Result<LimitEstimate, GaugeError> {
    // Clip the initial width to s so the shrinking windows actually
    // resolve small evaluation points; for s >= eps0 this is the plain
    // halving schedule.
    let mut eps = grid.eps0.min(s);
    let mut widths = Vec::with_capacity(grid.halvings + 1);
    let mut trace = Vec::with_capacity(grid.halvings + 1);
    let mut running = f64::INFINITY;
    for _ in 0..=grid.halvings {
        // Right part [s, s+eps), sampled identically in both modes so
        // the symmetric estimate dominates the right one window for
        // window.
        let mut sup = g.eval(s)?;
        for i in 0..grid.samples {
            let t = s + eps * (i as f64) / (grid.samples as f64);
            sup = sup.max(g.eval(t)?);
        }
        if symmetric {
            // Left part (s-eps, s), open end avoided by half-steps.
            let lo = (s - eps).max(0.0);
            for i in 1..=grid.samples {
                let t = s - (s - lo) * (i as f64 - 0.5) / (grid.samples as f64);
                sup = sup.max(g.eval(t)?);
            }
        }
        running = running.min(sup);
        widths.push(eps);
        trace.push(running);
        eps *= 0.5;
    }
    Ok(LimitEstimate {
        value: running,
        grid: widths,
        trace,
    })
}

/// Estimate `liminf_{t->inf} psi(t) = sup_{a>=0} inf{psi(t); t >= a}`
/// by sampling each tail `[a, t_far]` log-spaced.
pub fn liminf_tail(
    g: &Gauge,
    alphas: &[f64],
    t_far: f64,
    samples: usize,
) -> Result<LimitEstimate, GaugeError> {
    if alphas.is_empty() || samples < 2 || !(t_far > 0.0) {
        return Err(GaugeError::BadGrid {
            detail: String::from("need a non-empty alpha grid, t_far > 0 and >= 2 samples"),
        });
    }
    let mut grid = Vec::with_capacity(alphas.len());
    let mut trace = Vec::with_capacity(alphas.len());
    let mut running = f64::NEG_INFINITY;
    for &a in alphas {
        if !(a >= 0.0) || a >= t_far {
            return Err(GaugeError::BadGrid {
                detail: alloc::format!("alpha = {a} outside [0, t_far)"),
            });
        }
        let lo = a.max(1e-12);
        let ratio = t_far / lo;
        let mut inf = g.psi(a)?;
        for i in 0..samples {
            let t = lo * libm::pow(ratio, (i as f64) / ((samples - 1) as f64));
            let v = g.psi(t)?;
            if v < inf {
                inf = v;
            }
        }
        running = running.max(inf);
        grid.push(a);
        trace.push(running);
    }
    Ok(LimitEstimate {
        value: running,
        grid,
        trace,
    })
}

/// Grid over which classification verdicts are certified.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassifyConfig {
    /// Number of log-spaced evaluation points `s`.
    pub grid_points: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub limsup: LimsupGrid,
    /// Tail grid for the semi-coercivity estimate.
    pub psi_alphas: Vec<f64>,
    pub t_far: f64,
    pub tail_samples: usize,
    /// `Psi` at the largest alpha must exceed this for the
    /// semi-coercive verdict.
    pub coercive_threshold: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            grid_points: 512,
            s_min: 1e-6,
            s_max: 1e3,
            limsup: LimsupGrid::default(),
            psi_alphas: alloc::vec![1.0, 10.0, 100.0],
            t_far: 1e6,
            tail_samples: 4096,
            coercive_threshold: 1e-6,
        }
    }
}

impl ClassifyConfig {
    /// A cheap variant for high-volume randomized campaigns.
    pub fn fast() -> Self {
        ClassifyConfig {
            grid_points: 32,
            limsup: LimsupGrid {
                eps0: 1.0,
                halvings: 10,
                samples: 16,
            },
            tail_samples: 256,
            ..ClassifyConfig::default()
        }
    }

    pub fn s_grid(&self) -> Vec<f64> {
        let n = self.grid_points.max(2);
        let (lo, hi) = (libm::log(self.s_min), libm::log(self.s_max));
        (0..n)
            .map(|i| libm::exp(lo + (hi - lo) * (i as f64) / ((n - 1) as f64)))
            .collect()
    }
}

/// One class verdict: the minimal margin over the grid, the grid point
/// attaining it, and the analytic flag when the family carries one.
/// The verdict is the analytic flag if present, otherwise the strict
/// grid margin; both are reported.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassVerdict {
    pub pass: bool,
    pub margin: f64,
    pub witness: Option<f64>,
    pub analytic: Option<bool>,
}

impl ClassVerdict {
    fn from_min(margin: f64, witness: f64, analytic: Option<bool>) -> Self {
        ClassVerdict {
            pass: analytic.unwrap_or(margin > 0.0),
            margin,
            witness: Some(witness),
            analytic,
        }
    }
}

/// Grid-relative classification of a gauge (see module docs).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GaugeClassReport {
    pub normal: ClassVerdict,
    pub right_limit_normal: ClassVerdict,
    pub limit_normal: ClassVerdict,
    pub psi_semi_coercive: ClassVerdict,
    /// The `Psi(alpha)` estimates backing the semi-coercivity verdict.
    pub psi_estimate: LimitEstimate,
    /// Worst slack of the sandwich
    /// `phi(s) <= limsup_right <= limsup_sym <= s` over the grid. The
    /// last link carries a resolution allowance of the final window
    /// width: a sampled supremum over `[s, s + eps)` legitimately
    /// overshoots `s` by up to `eps` even for a normal gauge, so only
    /// `limsup_sym < s + eps` is certifiable. Negative means the
    /// sandwich failed beyond what sampling alone can explain.
    pub sandwich_margin: f64,
}

/// Classify a gauge on the configured grid. Verdicts are
/// grid-certified: strict pointwise inequalities over all of `R+`
/// cannot be decided numerically, only sampled.
pub fn classify(g: &Gauge, cfg: &ClassifyConfig) -> Result<GaugeClassReport, GaugeError> {
    let grid = cfg.s_grid();
    let flags = g.analytic_classes();
    let (an_normal, an_right, an_limit) = match flags {
        Some((a, b, c)) => (Some(a), Some(b), Some(c)),
        None => (None, None, None),
    };

    let phi0 = g.eval(0.0)?;
    let mut normal_margin = if libm::fabs(phi0) <= 1e-12 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let mut normal_witness = 0.0;

    let mut right_margin = f64::INFINITY;
    let mut right_witness = 0.0;
    let mut sym_margin = f64::INFINITY;
    let mut sym_witness = 0.0;
    let mut sandwich = f64::INFINITY;

    for &s in &grid {
        let phi_s = g.eval(s)?;
        // s - phi(s) via the residual: immune to the cancellation that
        // makes saturating families round to phi(s) = s.
        let slack = g.psi(s)?;
        if slack < normal_margin {
            normal_margin = slack;
            normal_witness = s;
        }
        let right = limsup_right(g, s, &cfg.limsup)?.value;
        let sym = limsup_sym(g, s, &cfg.limsup)?.value;
        if s - right < right_margin {
            right_margin = s - right;
            right_witness = s;
        }
        if s - sym < sym_margin {
            sym_margin = s - sym;
            sym_witness = s;
        }
        // phi(s) <= right <= sym <= s, worst slack of the three links;
        // the last link up to the final window resolution.
        let resolution = grid_resolution(&cfg.limsup, s);
        sandwich = sandwich
            .min(right - phi_s)
            .min(sym - right)
            .min(s + resolution - sym);
    }

    let psi_estimate = liminf_tail(g, &cfg.psi_alphas, cfg.t_far, cfg.tail_samples)?;
    let coercive = ClassVerdict {
        pass: psi_estimate.value > cfg.coercive_threshold,
        margin: psi_estimate.value - cfg.coercive_threshold,
        witness: psi_estimate.grid.last().copied(),
        analytic: None,
    };

    Ok(GaugeClassReport {
        normal: ClassVerdict::from_min(normal_margin, normal_witness, an_normal),
        right_limit_normal: ClassVerdict::from_min(right_margin, right_witness, an_right),
        limit_normal: ClassVerdict::from_min(sym_margin, sym_witness, an_limit),
        psi_semi_coercive: coercive,
        psi_estimate,
        sandwich_margin: sandwich,
    })
}

/// Finite-prefix limsup estimator: the max over the trailing `window`
/// entries. Exact for eventually monotone sequences once the window
/// lies past the turning point.
pub fn limsup_seq(prefix: &[f64], window: usize) -> Result<f64, GaugeError> {
    tail_extremum(prefix, window, true)
}

/// Finite-prefix liminf estimator (min over the trailing window).
pub fn liminf_seq(prefix: &[f64], window: usize) -> Result<f64, GaugeError> {
    tail_extremum(prefix, window, false)
}

fn tail_extremum(prefix: &[f64], window: usize, max: bool) -> Result<f64, GaugeError> {
    if prefix.is_empty() {
        return Err(GaugeError::EmptyPrefix);
    }
    let w = window.clamp(1, prefix.len());
    let tail = &prefix[prefix.len() - w..];
    Ok(tail.iter().copied().fold(
        if max { f64::NEG_INFINITY } else { f64::INFINITY },
        |acc, v| if max { acc.max(v) } else { acc.min(v) },
    ))
}

/// Result of the monotone-composition bound
/// `limsup F(a_n, b_n, c_n) <= F(limsup a, limsup b, limsup c)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComposeBound {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Check the composition bound for a composer `F` increasing in all
/// variables, using the trailing-window estimators on three bounded
/// prefixes. The default composer of interest is
/// `F(a,b,c) = a + max(b,c)`.
pub fn compose_bound_check<F>(
    f: F,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    window: usize,
    tol: f64,
) -> Result<ComposeBound, GaugeError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let n = a.len().min(b.len()).min(c.len());
    if n == 0 {
        return Err(GaugeError::EmptyPrefix);
    }
    let combined: Vec<f64> = (0..n).map(|i| f(a[i], b[i], c[i])).collect();
    let lhs = limsup_seq(&combined, window)?;
    let rhs = f(
        limsup_seq(&a[..n], window)?,
        limsup_seq(&b[..n], window)?,
        limsup_seq(&c[..n], window)?,
    );
    Ok(ComposeBound {
        lhs,
        rhs,
        pass: lhs <= rhs + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_families() {
        assert_eq!(Gauge::Linear(0.5).eval(2.0).unwrap(), 1.0);
        assert_eq!(Gauge::Rational.eval(1.0).unwrap(), 0.5);
        assert_eq!(Gauge::Linear(0.5).eval(0.0).unwrap(), 0.0);
        assert_eq!(Gauge::Rational.eval(0.0).unwrap(), 0.0);
        assert_eq!(Gauge::ExpSaturating.eval(0.0).unwrap(), 0.0);
        assert!(matches!(
            Gauge::Rational.eval(-1.0),
            Err(GaugeError::NegativeArgument { .. })
        ));
    }

    #[test]
    fn limsup_right_linear_is_exact() {
        // sup over [s, s+eps) of alpha*t tends to alpha*s as eps -> 0;
        // the sampled estimate must match the closed form closely.
        let g = Gauge::Linear(0.5);
        let grid = LimsupGrid::default();
        for s in [0.1, 1.0, 7.5, 100.0] {
            let est = limsup_right(&g, s, &grid).unwrap();
            assert!((est.value - 0.5 * s).abs() <= 0.5 * s * 1e-5 + 1e-9, "s={s}");
        }
    }

    #[test]
    fn limsup_right_rational() {
        let est = limsup_right(&Gauge::Rational, 1.0, &LimsupGrid::default()).unwrap();
        assert!((est.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn identity_gauge_hits_the_boundary() {
        // Linear(1.0) is not normal: the right limsup at s equals s.
        let est = limsup_right(&Gauge::Linear(1.0), 1.0, &LimsupGrid::default()).unwrap();
        assert!(est.value >= 1.0);
        let report = classify(&Gauge::Linear(1.0), &ClassifyConfig::fast()).unwrap();
        assert!(!report.normal.pass);
        assert!(!report.right_limit_normal.pass);
    }

    #[test]
    fn traces_are_monotone() {
        let est = limsup_right(&Gauge::Rational, 2.0, &LimsupGrid::default()).unwrap();
        for w in est.trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let psi = liminf_tail(&Gauge::Linear(0.5), &[1.0, 10.0, 100.0], 1e6, 512).unwrap();
        for w in psi.trace.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn classify_linear_and_rational_pass_all() {
        let cfg = ClassifyConfig::fast();
        for g in [Gauge::Linear(0.5), Gauge::Rational] {
            let r = classify(&g, &cfg).unwrap();
            assert!(r.normal.pass, "{g:?}");
            assert!(r.right_limit_normal.pass, "{g:?}");
            assert!(r.limit_normal.pass, "{g:?}");
            assert!(r.psi_semi_coercive.pass, "{g:?}");
            assert!(r.sandwich_margin >= -1e-9, "{g:?}");
        }
    }

    #[test]
    fn classify_expsat_fails_only_semi_coercive() {
        // psi(t) = t exp(-t) -> 0, so the tail infimum collapses.
        let r = classify(&Gauge::ExpSaturating, &ClassifyConfig::fast()).unwrap();
        assert!(r.normal.pass);
        assert!(r.right_limit_normal.pass);
        assert!(r.limit_normal.pass);
        assert!(!r.psi_semi_coercive.pass);
        assert!(r.psi_estimate.value < 1e-6);
    }

    #[test]
    fn seq_estimators() {
        let xs: Vec<f64> = (1..=1000).map(|n| 1.0 + 1.0 / n as f64).collect();
        let est = limsup_seq(&xs, 100).unwrap();
        assert!((est - (1.0 + 1.0 / 901.0)).abs() < 1e-12);

        let constant = [3.0; 10];
        assert_eq!(limsup_seq(&constant, 5).unwrap(), 3.0);
        assert_eq!(liminf_seq(&constant, 5).unwrap(), 3.0);

        let alt: Vec<f64> = (1..=1000)
            .map(|n| 2.0 + if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64)
            .collect();
        let est = limsup_seq(&alt, 100).unwrap();
        assert!((est - (2.0 + 1.0 / 902.0)).abs() < 1e-12);

        assert!(matches!(limsup_seq(&[], 4), Err(GaugeError::EmptyPrefix)));
    }

    #[test]
    fn compose_bound_examples() {
        let f = |a: f64, b: f64, c: f64| a + b.max(c);
        let n = 1000usize;
        let a: Vec<f64> = (1..=n).map(|k| 1.0 + 1.0 / k as f64).collect();
        let b: Vec<f64> = (1..=n)
            .map(|k| 2.0 + if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64)
            .collect();
        let c = alloc::vec![1.0; n];
        let r = compose_bound_check(f, &a, &b, &c, 100, 1e-9).unwrap();
        assert!(r.pass);
        assert!((r.rhs - 3.0).abs() < 1e-2);

        let r = compose_bound_check(f, &[1.0; 8], &[2.0; 8], &[3.0; 8], 4, 0.0).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert_eq!(r.rhs, 4.0);
        assert!(r.pass);

        let null: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let r = compose_bound_check(f, &null, &null, &null, 100, 1e-9).unwrap();
        assert!(r.pass && r.lhs <= r.rhs + 1e-9);
    }
}
