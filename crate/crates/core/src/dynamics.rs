//! Picard orbits, sequence diagnostics and fixed-point certification.
//!
//! The central objects are the orbit traces `rho_n = d(x_n, x_{n+1})`,
//! `alpha_n = d(x_n, x_n)` and the double sequence
//! `delta_{m,n} = d(x_m, x_n)`. A sequence is *e-convergent* to `x`
//! when `e(x_n, x) -> 0`, equivalently when both `d(x_n, x)` and the
//! double limit of `delta` equal `d(x,x)`; it is *e-Cauchy* when the
//! double limit of `delta` exists at all; and *e-semi-Cauchy* when
//! only the `alpha` and `rho` traces settle to a common value `gamma`.
//! d-limits, by contrast, are not unique: the partial-metric topology
//! is merely T0, and the diagnostics here exhibit that distinctness.
//!
//! On finite spaces the fixed-point structure is enumerated exactly:
//! the d-fixed set `Fix(T;d) = {z : d(z,Tz) = d(z,z)}`, the infimum
//! `theta` of its self-distances, the argmin set `X(T;d)`, and the
//! true fixed set `Fix(T)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::contraction::{
    verify_contractive_finite, verify_contractive_sampled, ContractionError, FiniteMap, GKind,
    RegionSampler, ScalarMap, SelfMap,
};
use crate::gauge::{classify, ClassifyConfig, Gauge, GaugeError};
use crate::space::{self, ContinuousSpace, FiniteSpace, PartialMetric, SpaceError};

/// Why an orbit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    /// The e-residual `e(x_n, x_{n+1})` fell below the stop tolerance.
    Converged,
    /// The iteration budget ran out; convergence is never claimed here.
    Budget,
}

/// Iteration budget for orbit generation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationBudget {
    pub max_iter: usize,
    /// Stop rule on the e-metric residual (Theorem-1 convergence is
    /// e-convergence, so the d-residual would be the wrong yardstick).
    pub stop_tol: f64,
}

impl Default for IterationBudget {
    fn default() -> Self {
        IterationBudget {
            max_iter: 1_000_000,
            stop_tol: 1e-12,
        }
    }
}

/// A Picard orbit with its diagnostic traces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrbitTrace<P> {
    pub points: Vec<P>,
    /// `rho_n = d(x_n, x_{n+1})`, length = points - 1.
    pub rho: Vec<f64>,
    /// `alpha_n = d(x_n, x_n)`, length = points.
    pub alpha: Vec<f64>,
    /// `d(x_m, x_n)` over all pairs `m <= n` of the trailing window.
    pub delta_window: Vec<f64>,
    pub gamma_estimate: f64,
    pub stop_reason: StopReason,
}

/// Generate the Picard orbit of `x0` until the e-residual drops below
/// `budget.stop_tol` or the budget runs out. Budget exhaustion is a
/// stop reason, not an error; convergence is never claimed for it.
pub fn iterate<S, M>(
    space: &S,
    map: &M,
    x0: S::Point,
    budget: &IterationBudget,
    window: usize,
) -> OrbitTrace<S::Point>
where
    S: PartialMetric,
    M: SelfMap<S::Point>,
{
    let mut points = alloc::vec![x0];
    let mut rho = Vec::new();
    let mut alpha = alloc::vec![space.self_d(&points[0])];
    let mut stop_reason = StopReason::Budget;

    for _ in 0..budget.max_iter {
        let cur = points.last().unwrap().clone();
        let next = map.apply(&cur);
        rho.push(space.d(&cur, &next));
        alpha.push(space.self_d(&next));
        let res = space::e(space, &cur, &next);
        points.push(next);
        if res <= budget.stop_tol {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    let delta_window = trailing_delta(space, &points, window);
    let last = points.last().unwrap();
    OrbitTrace {
        gamma_estimate: space.self_d(last),
        points,
        rho,
        alpha,
        delta_window,
        stop_reason,
    }
}

/// All `d(x_m, x_n)` for `m <= n` over the trailing `window` entries.
pub fn trailing_delta<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    window: usize,
) -> Vec<f64> {
    let w = window.clamp(1, prefix.len());
    let tail = &prefix[prefix.len() - w..];
    let mut out = Vec::with_capacity(w * (w + 1) / 2);
    for m in 0..w {
        for n in m..w {
            out.push(space.d(&tail[m], &tail[n]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    EmptyPrefix,
    BudgetExhausted,
    /// One of a theorem's asserted conclusions failed beyond tolerance:
    /// either a genuine counterexample or bad tolerances. The
    /// certificate is withheld.
    ConclusionViolated { which: String },
    /// A named machine-checked hypothesis failed.
    HypothesisFailed { name: String },
    /// Two certified limits are not e-close: counterexample escalation.
    UniquenessViolated { detail: String },
    Space(SpaceError),
    Gauge(GaugeError),
    Contraction(ContractionError),
}

impl core::fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DynamicsError::EmptyPrefix => write!(f, "sequence prefix is empty"),
            DynamicsError::BudgetExhausted => write!(f, "iteration budget exhausted"),
            DynamicsError::ConclusionViolated { which } => {
                write!(f, "conclusion violated: {which}")
            }
            DynamicsError::HypothesisFailed { name } => write!(f, "hypothesis failed: {name}"),
            DynamicsError::UniquenessViolated { detail } => {
                write!(f, "uniqueness violated: {detail}")
            }
            DynamicsError::Space(e) => write!(f, "{e}"),
            DynamicsError::Gauge(e) => write!(f, "{e}"),
            DynamicsError::Contraction(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<SpaceError> for DynamicsError {
    fn from(e: SpaceError) -> Self {
        DynamicsError::Space(e)
    }
}

impl From<GaugeError> for DynamicsError {
    fn from(e: GaugeError) -> Self {
        DynamicsError::Gauge(e)
    }
}

impl From<ContractionError> for DynamicsError {
    fn from(e: ContractionError) -> Self {
        DynamicsError::Contraction(e)
    }
}

/// Verdict of the d-convergence test `lim d(x_n, x) = d(x,x)`, judged
/// on the trailing window.
pub fn diagnose_d_convergence<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    candidate: &S::Point,
    tol: f64,
    window: usize,
) -> Result<bool, DynamicsError> {
    if prefix.is_empty() {
        return Err(DynamicsError::EmptyPrefix);
    }
    let w = window.clamp(1, prefix.len());
    let target = space.self_d(candidate);
    Ok(prefix[prefix.len() - w..]
        .iter()
        .all(|x| libm::fabs(space.d(x, candidate) - target) <= tol))
}

/// Both characterizations of e-convergence toward a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EConvergenceReport {
    /// `e(x_n, x) -> 0` directly (this is the verdict).
    pub direct: bool,
    /// `lim d(x_n,x) = lim_{m,n} d(x_m,x_n) = d(x,x)`.
    pub characterization: bool,
    pub agree: bool,
}

/// e-convergence toward `candidate`, computed both directly and
/// through the double-limit characterization; the two must agree.
pub fn diagnose_e_convergence<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    candidate: &S::Point,
    tol: f64,
    window: usize,
) -> Result<EConvergenceReport, DynamicsError> {
    if prefix.is_empty() {
        return Err(DynamicsError::EmptyPrefix);
    }
    let w = window.clamp(1, prefix.len());
    let tail = &prefix[prefix.len() - w..];
    let direct = tail
        .iter()
        .all(|x| space::e(space, x, candidate) <= tol);

    let target = space.self_d(candidate);
    let single = tail
        .iter()
        .all(|x| libm::fabs(space.d(x, candidate) - target) <= tol);
    let double = trailing_delta(space, prefix, w)
        .iter()
        .all(|&v| libm::fabs(v - target) <= tol);
    let characterization = single && double;

    Ok(EConvergenceReport {
        direct,
        characterization,
        agree: direct == characterization,
    })
}

/// Verdict and limit estimate of the e-Cauchy test, with the
/// cross-check that the d-side (double limit of `delta` exists) and
/// the e-side (`e(x_m, x_n) -> 0`) agree.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ECauchyReport {
    pub verdict: bool,
    pub gamma: f64,
    pub d_side: bool,
    pub e_side: bool,
    pub agree: bool,
}

pub fn diagnose_e_cauchy<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    tol: f64,
    window: usize,
) -> Result<ECauchyReport, DynamicsError> {
    if prefix.is_empty() {
        return Err(DynamicsError::EmptyPrefix);
    }
    let w = window.clamp(1, prefix.len());
    let deltas = trailing_delta(space, prefix, w);
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &v in &deltas {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let d_side = hi - lo <= tol;
    let gamma = sum / deltas.len() as f64;

    // e(x_m,x_n) = 2 delta_{m,n} - alpha_m - alpha_n <= 2 (hi - lo),
    // so the e-side threshold is twice the spread tolerance.
    let tail = &prefix[prefix.len() - w..];
    let mut e_max = 0.0f64;
    for m in 0..w {
        for n in m..w {
            e_max = e_max.max(space::e(space, &tail[m], &tail[n]));
        }
    }
    let e_side = e_max <= 2.0 * tol;

    Ok(ECauchyReport {
        verdict: d_side,
        gamma,
        d_side,
        e_side,
        agree: d_side == e_side,
    })
}

/// Verdict and common limit of the e-semi-Cauchy test: the `alpha` and
/// `rho` traces must each be eventually non-increasing (within `tol`)
/// and settle, over the trailing window, to a common `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SemiCauchyReport {
    pub verdict: bool,
    pub gamma: f64,
    pub alpha_settles: bool,
    pub rho_settles: bool,
    pub gammas_agree: bool,
}

pub fn diagnose_semi_cauchy<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    tol: f64,
    window: usize,
) -> Result<SemiCauchyReport, DynamicsError> {
    if prefix.len() < 2 {
        return Err(DynamicsError::EmptyPrefix);
    }
    let alpha: Vec<f64> = prefix.iter().map(|x| space.self_d(x)).collect();
    let rho: Vec<f64> = prefix
        .windows(2)
        .map(|w| space.d(&w[0], &w[1]))
        .collect();

    let (alpha_settles, gamma_a) = settles(&alpha, tol, window);
    let (rho_settles, gamma_r) = settles(&rho, tol, window);
    let gammas_agree = libm::fabs(gamma_a - gamma_r) <= tol;
    let gamma = 0.5 * (gamma_a + gamma_r);
    Ok(SemiCauchyReport {
        verdict: alpha_settles && rho_settles && gammas_agree,
        gamma,
        alpha_settles,
        rho_settles,
        gammas_agree,
    })
}

/// A real trace settles (searrow-style) when it is non-increasing
/// within `tol` from some index onward and its trailing window has
/// spread at most `tol`. Returns the verdict and the window mean.
fn settles(trace: &[f64], tol: f64, window: usize) -> (bool, f64) {
    let w = window.clamp(1, trace.len());
    let tail = &trace[trace.len() - w..];
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &v in tail {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mean = sum / w as f64;
    // Eventual monotonicity: the k-shifted descent must have begun no
    // later than the start of the window.
    let mut mono_from = trace.len();
    for i in (1..trace.len()).rev() {
        if trace[i] <= trace[i - 1] + tol {
            mono_from = i - 1;
        } else {
            break;
        }
    }
    let eventually_descending = mono_from <= trace.len().saturating_sub(w);
    (eventually_descending && hi - lo <= tol, mean)
}

/// Outcome of the violation-rank extraction on a prefix diagnosed
/// e-semi-Cauchy with limit `gamma`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RankVerdict {
    /// The prefix looks e-Cauchy at this epsilon: the negation of the
    /// threshold condition holds for large j. A legitimate negative
    /// result, not a failure.
    NoViolationFound,
    Found(RankExtraction),
}

/// Rank sequences `(m(j), n(j))` witnessing the failure of the
/// e-Cauchy property: for each `j`, the pair with minimal `n` (then
/// minimal `m`) satisfying `j <= m <= n` and
/// `d(x_m, x_n) >= gamma + eps`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RankExtraction {
    /// First j with extracted pairs.
    pub k: usize,
    /// `pairs[i]` is `(m(j), n(j))` for `j = k + i`.
    pub pairs: Vec<(usize, usize)>,
    pub extracted_distances: Vec<f64>,
    /// First index past which `gamma - tol <= alpha_i <= rho_i <
    /// gamma + eps` holds through the prefix end.
    pub j_eps: Option<usize>,
    /// `n(j) - m(j) >= 2` and `d(x_{m(j)}, x_{n(j)-1}) < gamma + eps`
    /// for every extracted `j >= j_eps`.
    pub strict_bound_holds: bool,
    /// Max excess `d(x_{m(j)}, x_{n(j)}) - (gamma + eps)` over the
    /// trailing quartile of extracted pairs (descent toward the level).
    pub trailing_excess: f64,
    /// Max deviation `|d(x_{m(j)+p}, x_{n(j)+q}) - (gamma + eps)|`
    /// over `p, q` in `{0,1}` on the trailing quartile.
    pub shifted_max_deviation: f64,
}

/// Extract the violation ranks of a semi-Cauchy-but-not-e-Cauchy
/// prefix at level `gamma + eps`.
pub fn extract_violation_ranks<S: PartialMetric>(
    space: &S,
    prefix: &[S::Point],
    gamma: f64,
    eps: f64,
    k: usize,
    tol: f64,
) -> Result<RankVerdict, DynamicsError> {
    if prefix.len() < 2 {
        return Err(DynamicsError::EmptyPrefix);
    }
    if !(eps > 0.0) {
        return Err(DynamicsError::Space(SpaceError::BadParameter {
            detail: alloc::format!("eps must be positive, got {eps}"),
        }));
    }
    let level = gamma + eps;
    let len = prefix.len();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut dists: Vec<f64> = Vec::new();
    // Minimal n is non-decreasing in j, so resume the n scan where the
    // previous j left it.
    let mut n_start = k;
    'outer: for j in k..len {
        let mut found = None;
        let from = n_start.max(j);
        for n in from..len {
            for m in j..=n {
                if space.d(&prefix[m], &prefix[n]) >= level {
                    found = Some((m, n));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        match found {
            Some((m, n)) => {
                n_start = n;
                dists.push(space.d(&prefix[m], &prefix[n]));
                pairs.push((m, n));
            }
            // The qualifying set shrinks as j grows: once empty, done.
            None => break 'outer,
        }
    }
    // A genuine violation keeps producing pairs arbitrarily far out;
    // on a finite prefix that shows up as extraction persisting until
    // the data runs out. A stall whose last pair sits before the
    // trailing quartile means the level is only crossed on an initial
    // segment: the tail is level-clean and no violation is claimed.
    let deep_enough = pairs
        .last()
        .map(|&(_, n)| n + len.div_ceil(4) >= len)
        .unwrap_or(false);
    if !deep_enough {
        return Ok(RankVerdict::NoViolationFound);
    }

    // (210)-style rank: past j_eps the alpha and rho traces sit in
    // [gamma - tol, gamma + eps).
    let alpha: Vec<f64> = prefix.iter().map(|x| space.self_d(x)).collect();
    let rho: Vec<f64> = prefix.windows(2).map(|w| space.d(&w[0], &w[1])).collect();
    let mut j_eps = None;
    for i0 in k..rho.len() {
        let ok = (i0..rho.len())
            .all(|i| alpha[i] >= gamma - tol && alpha[i] <= rho[i] + tol && rho[i] < level);
        if ok {
            j_eps = Some(i0);
            break;
        }
    }

    let mut strict = true;
    if let Some(je) = j_eps {
        for (idx, &(m, n)) in pairs.iter().enumerate() {
            let j = k + idx;
            if j < je {
                continue;
            }
            if n - m < 2 || space.d(&prefix[m], &prefix[n - 1]) >= level {
                strict = false;
                break;
            }
        }
    } else {
        strict = false;
    }

    let q_start = pairs.len() - pairs.len().div_ceil(4);
    let mut excess = f64::NEG_INFINITY;
    let mut shifted = 0.0f64;
    for (idx, &(m, n)) in pairs.iter().enumerate().skip(q_start) {
        excess = excess.max(dists[idx] - level);
        for p in 0..2usize {
            for q in 0..2usize {
                if m + p < len && n + q < len {
                    shifted =
                        shifted.max(libm::fabs(space.d(&prefix[m + p], &prefix[n + q]) - level));
                }
            }
        }
    }

    Ok(RankVerdict::Found(RankExtraction {
        k,
        pairs,
        extracted_distances: dists,
        j_eps,
        strict_bound_holds: strict,
        trailing_excess: excess,
        shifted_max_deviation: shifted,
    }))
}

/// Whether a hypothesis was machine-checked, assumed, or found false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HypothesisStatus {
    Verified,
    VerifiedSampled,
    Assumed,
    Failed,
    NotChecked,
}

/// Which hypotheses backed a certificate. Completeness of `(X, e)` is
/// not machine-checkable for user families and stays an assumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisRecord {
    pub completeness: HypothesisStatus,
    pub contractive: HypothesisStatus,
    pub gauge_right_limit_normal: HypothesisStatus,
    pub gauge_limit_normal: HypothesisStatus,
    pub psi_semi_coercive: HypothesisStatus,
}

impl HypothesisRecord {
    pub fn assumed() -> Self {
        HypothesisRecord {
            completeness: HypothesisStatus::Assumed,
            contractive: HypothesisStatus::Assumed,
            gauge_right_limit_normal: HypothesisStatus::Assumed,
            gauge_limit_normal: HypothesisStatus::NotChecked,
            psi_semi_coercive: HypothesisStatus::NotChecked,
        }
    }
}

/// What a certificate claims about its point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CertificateKind {
    /// `d(x*, Tx*) = d(x*, x*)` within tolerance.
    DFixedPoint,
    /// Additionally `e(x*, Tx*) = 0` within tolerance.
    TrueFixedPoint,
    /// The unique fixed point under the stronger hypotheses.
    Theorem2Unique,
}

/// The verdict of a solve or verification run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate<P> {
    pub kind: CertificateKind,
    pub point: P,
    pub d_self: f64,
    pub d_to_image: f64,
    pub e_residual: f64,
    pub gamma: f64,
    pub hypotheses: HypothesisRecord,
    /// Infimum of self-distances over `Fix(T;d)`; finite spaces only.
    pub theta: Option<f64>,
    /// The argmin set `X(T;d)`; finite spaces only.
    pub x_td: Option<Vec<P>>,
}

/// Per-conclusion checks of a certified Picard run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConclusionChecks {
    /// (i) `rho` non-increasing along the whole trace.
    pub rho_descending: bool,
    /// (ii) `alpha <= rho` pointwise and `alpha` searrows to gamma.
    pub alpha_settles: bool,
    /// (iii) the trailing `delta` block settles to gamma.
    pub delta_settles: bool,
    /// Index from which all `d(x_m, x_n)` lie within tol of gamma.
    pub delta_settle_index: usize,
}

/// A certified Theorem-1 style run: certificate, trace and the
/// per-conclusion audit.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun<P> {
    pub certificate: Certificate<P>,
    pub trace: OrbitTrace<P>,
    pub conclusions: ConclusionChecks,
}

/// Run the Picard iteration and certify the descent conclusions on the
/// trace: `rho` descending, `alpha` searrow `gamma`, the `delta` block
/// settling to `gamma`, and the limit being a d-fixed point.
///
/// The caller supplies the hypothesis record (which of completeness /
/// contractivity / gauge normality were machine-checked); an
/// `Assumed` entry is legitimate but recorded as such.
pub fn solve_theorem1<S, M>(
    space: &S,
    map: &M,
    x0: S::Point,
    budget: &IterationBudget,
    tol: f64,
    hypotheses: HypothesisRecord,
) -> Result<PicardRun<S::Point>, DynamicsError>
where
    S: PartialMetric,
    M: SelfMap<S::Point>,
{
    let trace = iterate(space, map, x0, budget, 64);
    if trace.stop_reason == StopReason::Budget {
        return Err(DynamicsError::BudgetExhausted);
    }
    let x_star = trace.points.last().unwrap().clone();
    let gamma = space.self_d(&x_star);

    // (i) rho descending.
    let rho_descending = trace.rho.windows(2).all(|w| w[1] <= w[0] + tol);
    if !rho_descending {
        return Err(DynamicsError::ConclusionViolated {
            which: String::from("rho trace is not descending"),
        });
    }

    // (ii) alpha <= rho pointwise (Matthews along the orbit) and alpha
    // searrows to gamma: non-increasing from some index, staying above
    // gamma - tol.
    let alpha_le_rho = trace
        .rho
        .iter()
        .zip(&trace.alpha)
        .all(|(r, a)| *a <= *r + tol);
    let mut mono_from = trace.alpha.len();
    for i in (1..trace.alpha.len()).rev() {
        if trace.alpha[i] <= trace.alpha[i - 1] + tol && trace.alpha[i] >= gamma - tol {
            mono_from = i - 1;
        } else {
            break;
        }
    }
    let alpha_settles = alpha_le_rho && mono_from < trace.alpha.len();
    if !alpha_settles {
        return Err(DynamicsError::ConclusionViolated {
            which: String::from("alpha trace does not settle onto gamma"),
        });
    }

    // (iii) delta settles: from some index on, all pairwise distances
    // lie within tol of gamma, covering at least the last two points.
    let pts = &trace.points;
    let mut settle_index = pts.len();
    'scan: for m0 in (0..pts.len().saturating_sub(1)).rev() {
        for m in m0..pts.len() {
            for n in m..pts.len() {
                if libm::fabs(space.d(&pts[m], &pts[n]) - gamma) > tol {
                    break 'scan;
                }
            }
        }
        settle_index = m0;
    }
    let delta_settles = settle_index + 2 <= pts.len();
    if !delta_settles {
        return Err(DynamicsError::ConclusionViolated {
            which: String::from("delta block does not settle onto gamma"),
        });
    }

    let image = map.apply(&x_star);
    let d_to_image = space.d(&x_star, &image);
    let e_residual = space::e(space, &x_star, &image);
    if libm::fabs(d_to_image - gamma) > tol {
        return Err(DynamicsError::ConclusionViolated {
            which: String::from("limit is not a d-fixed point"),
        });
    }
    let kind = if e_residual <= tol {
        CertificateKind::TrueFixedPoint
    } else {
        CertificateKind::DFixedPoint
    };

    Ok(PicardRun {
        certificate: Certificate {
            kind,
            point: x_star,
            d_self: gamma,
            d_to_image,
            e_residual,
            gamma,
            hypotheses,
            theta: None,
            x_td: None,
        },
        conclusions: ConclusionChecks {
            rho_descending,
            alpha_settles,
            delta_settles,
            delta_settle_index: settle_index,
        },
        trace,
    })
}

/// The exact fixed-point structure of a finite space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FixedStructure {
    /// `Fix(T;d) = {z : |d(z,Tz) - d(z,z)| <= tol}`.
    pub fix_d: Vec<usize>,
    /// `min {d(z,z) : z in Fix(T;d)}`; `None` when the set is empty.
    pub theta: Option<f64>,
    /// Argmin set of the self-distance over `Fix(T;d)`.
    pub x_td: Vec<usize>,
    /// `Fix(T) = {z : Tz = z}` by exact index equality.
    pub fix: Vec<usize>,
}

impl FixedStructure {
    pub fn x_td_subset_of_fix(&self) -> bool {
        self.x_td.iter().all(|z| self.fix.contains(z))
    }
}

/// Enumerate `Fix(T;d)`, `theta`, `X(T;d)` and `Fix(T)` exactly.
pub fn enumerate_fixed_structure(
    space: &FiniteSpace,
    map: &FiniteMap,
    tol: f64,
) -> FixedStructure {
    let n = space.len();
    let fix_d: Vec<usize> = (0..n)
        .filter(|&z| {
            let tz = map.apply(&z);
            libm::fabs(space.d(&z, &tz) - space.d(&z, &z)) <= tol
        })
        .collect();
    let theta = fix_d
        .iter()
        .map(|&z| space.d(&z, &z))
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });
    let x_td = match theta {
        Some(t) => fix_d
            .iter()
            .copied()
            .filter(|&z| space.d(&z, &z) <= t + tol)
            .collect(),
        None => Vec::new(),
    };
    let fix: Vec<usize> = (0..n).filter(|&z| map.apply(&z) == z).collect();
    FixedStructure {
        fix_d,
        theta,
        x_td,
        fix,
    }
}

/// Theorem-2 certification on a finite space: machine-check the
/// stronger hypotheses (contractivity with `g = b`; limit-normal gauge
/// with semi-coercive residual), then enumerate and assert that
/// `Fix(T)` is a nonempty singleton equal to `X(T;d)`.
pub fn solve_theorem2_finite(
    space: &FiniteSpace,
    map: &FiniteMap,
    gauge: &Gauge,
    classify_cfg: &ClassifyConfig,
    tol: f64,
) -> Result<(Certificate<usize>, FixedStructure), DynamicsError> {
    let contraction = verify_contractive_finite(space, map, gauge, GKind::B, tol)?;
    if !contraction.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("(M;b;phi)-contractive"),
        });
    }
    let classes = classify(gauge, classify_cfg)?;
    if !classes.normal.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("normal"),
        });
    }
    if !classes.limit_normal.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("limit-normal"),
        });
    }
    if !classes.psi_semi_coercive.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("semi-coercive"),
        });
    }

    let structure = enumerate_fixed_structure(space, map, tol);
    if structure.fix.len() != 1 {
        return Err(DynamicsError::UniquenessViolated {
            detail: alloc::format!("|Fix(T)| = {}, expected a singleton", structure.fix.len()),
        });
    }
    if structure.x_td != structure.fix {
        return Err(DynamicsError::ConclusionViolated {
            which: String::from("X(T;d) differs from Fix(T)"),
        });
    }
    let z = structure.fix[0];
    let tz = map.apply(&z);
    let hypotheses = HypothesisRecord {
        completeness: HypothesisStatus::Verified, // finite spaces are complete
        contractive: HypothesisStatus::Verified,
        gauge_right_limit_normal: HypothesisStatus::Verified,
        gauge_limit_normal: HypothesisStatus::Verified,
        psi_semi_coercive: HypothesisStatus::Verified,
    };
    let cert = Certificate {
        kind: CertificateKind::Theorem2Unique,
        point: z,
        d_self: space.d(&z, &z),
        d_to_image: space.d(&z, &tz),
        e_residual: space::e(space, &z, &tz),
        gamma: space.d(&z, &z),
        hypotheses,
        theta: structure.theta,
        x_td: Some(structure.x_td.clone()),
    };
    Ok((cert, structure))
}

/// Theorem-2 certification on a scalar continuous space: sampled
/// contractivity with `g = b`, gauge classification, then multi-start
/// Picard runs whose certified limits must agree in the e-metric and
/// be true fixed points. Theta is not computed here (no sound
/// desk-scale estimator over an uncountable point set).
pub fn solve_theorem2_continuous(
    space: &ContinuousSpace,
    map: &ScalarMap,
    gauge: &Gauge,
    sampler: &RegionSampler,
    budget: &IterationBudget,
    classify_cfg: &ClassifyConfig,
    tol: f64,
    starts: usize,
) -> Result<Certificate<f64>, DynamicsError> {
    let contraction = verify_contractive_sampled(space, map, gauge, GKind::B, tol, sampler)?;
    if !contraction.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("(M;b;phi)-contractive (sampled)"),
        });
    }
    let classes = classify(gauge, classify_cfg)?;
    if !classes.normal.pass || !classes.limit_normal.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("limit-normal"),
        });
    }
    if !classes.psi_semi_coercive.pass {
        return Err(DynamicsError::HypothesisFailed {
            name: String::from("semi-coercive"),
        });
    }

    let hypotheses = HypothesisRecord {
        completeness: HypothesisStatus::Assumed,
        contractive: HypothesisStatus::VerifiedSampled,
        gauge_right_limit_normal: HypothesisStatus::Verified,
        gauge_limit_normal: HypothesisStatus::Verified,
        psi_semi_coercive: HypothesisStatus::Verified,
    };

    let mut best: Option<Certificate<f64>> = None;
    for x0 in sampler.starts(starts) {
        let run = solve_theorem1(space, map, x0, budget, tol, hypotheses)?;
        let cert = run.certificate;
        if cert.e_residual > tol {
            return Err(DynamicsError::ConclusionViolated {
                which: alloc::format!(
                    "limit from start {x0} is only d-fixed (e-residual {})",
                    cert.e_residual
                ),
            });
        }
        if let Some(prev) = &best {
            let gap = space::e(space, &prev.point, &cert.point);
            if gap > tol {
                return Err(DynamicsError::UniquenessViolated {
                    detail: alloc::format!(
                        "limits {} and {} are e-distance {gap} apart",
                        prev.point,
                        cert.point
                    ),
                });
            }
        } else {
            best = Some(Certificate {
                kind: CertificateKind::Theorem2Unique,
                ..cert
            });
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table3() -> FiniteSpace {
        FiniteSpace::from_table(vec![
            vec![0.0, 2.0, 3.0],
            vec![2.0, 1.0, 3.0],
            vec![3.0, 3.0, 2.0],
        ])
        .unwrap()
    }

    fn max_space() -> ContinuousSpace {
        ContinuousSpace::MaxOnRPlus
    }

    /// Embed a real sequence as points of the standard metric on R by
    /// way of a weighted space with zero weight.
    fn standard_line() -> ContinuousSpace {
        ContinuousSpace::Weighted {
            weight: alloc::sync::Arc::new(|_| 0.0),
        }
    }

    fn harmonic(terms: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(terms);
        let mut h = 0.0;
        for n in 1..=terms {
            h += 1.0 / n as f64;
            out.push(h);
        }
        out
    }

    #[test]
    fn halving_orbit_on_max_space() {
        let trace = iterate(
            &max_space(),
            &ScalarMap::Halving,
            1.0,
            &IterationBudget::default(),
            16,
        );
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert!(trace.points.len() <= 50);
        // rho_n = alpha_n = 2^-n.
        for (n, (&r, &a)) in trace.rho.iter().zip(&trace.alpha).enumerate() {
            let expect = libm::pow(0.5, n as f64);
            assert_eq!(a, expect);
            assert_eq!(r, expect);
        }
        assert!(trace.gamma_estimate < 1e-11);
    }

    #[test]
    fn fixed_start_stops_immediately() {
        let trace = iterate(
            &max_space(),
            &ScalarMap::Affine { a: 1.0, b: 0.0 },
            0.7,
            &IterationBudget::default(),
            8,
        );
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert_eq!(trace.points.len(), 2);
        assert_eq!(trace.rho[0], 0.7);
    }

    #[test]
    fn constant_map_orbit_on_table() {
        let s = table3();
        let map = FiniteMap::constant(0, &s).unwrap();
        let trace = iterate(&s, &map, 2usize, &IterationBudget::default(), 8);
        assert_eq!(trace.stop_reason, StopReason::Converged);
        assert_eq!(trace.points[0], 2);
        assert_eq!(trace.points[1], 0);
        assert_eq!(trace.rho[0], 3.0);
        assert_eq!(trace.alpha[0], 2.0);
    }

    #[test]
    fn d_limits_are_not_unique() {
        let s = max_space();
        let xs: Vec<f64> = (1..=1000).map(|n| 1.0 + 1.0 / n as f64).collect();
        // d-converges to both 1 and 2 under max (the topology is T0).
        assert!(diagnose_d_convergence(&s, &xs, &1.0, 2e-3, 100).unwrap());
        assert!(diagnose_d_convergence(&s, &xs, &2.0, 1e-9, 100).unwrap());
        assert!(!diagnose_d_convergence(&s, &xs, &0.5, 1e-3, 100).unwrap());
        // e-converges only to 1.
        let r1 = diagnose_e_convergence(&s, &xs, &1.0, 3e-3, 100).unwrap();
        assert!(r1.direct && r1.agree);
        let r2 = diagnose_e_convergence(&s, &xs, &2.0, 3e-3, 100).unwrap();
        assert!(!r2.direct && r2.agree);
    }

    #[test]
    fn constant_sequence_diagnostics() {
        let s = max_space();
        let xs = vec![3.0; 50];
        let r = diagnose_e_convergence(&s, &xs, &3.0, 1e-12, 10).unwrap();
        assert!(r.direct && r.characterization);
        let c = diagnose_e_cauchy(&s, &xs, 1e-12, 10).unwrap();
        assert!(c.verdict && c.agree);
        assert_eq!(c.gamma, 3.0);
        let sc = diagnose_semi_cauchy(&s, &xs, 1e-12, 10).unwrap();
        assert!(sc.verdict);
        assert_eq!(sc.gamma, 3.0);
    }

    #[test]
    fn harmonic_is_semi_cauchy_not_cauchy() {
        let s = standard_line();
        let xs = harmonic(2000);
        let sc = diagnose_semi_cauchy(&s, &xs, 1e-3, 100).unwrap();
        assert!(sc.verdict);
        assert!(sc.gamma.abs() < 1e-3);
        let c = diagnose_e_cauchy(&s, &xs, 1e-3, 100).unwrap();
        assert!(!c.verdict && c.agree);
    }

    #[test]
    fn alternating_sequence_not_semi_cauchy() {
        let s = standard_line();
        let xs: Vec<f64> = (0..100).map(|n| (n % 2) as f64).collect();
        let sc = diagnose_semi_cauchy(&s, &xs, 1e-9, 10).unwrap();
        // rho = 1 and alpha = 0 settle to different values.
        assert!(!sc.verdict);
        assert!(sc.alpha_settles && sc.rho_settles && !sc.gammas_agree);
    }

    #[test]
    fn rank_extraction_on_harmonic() {
        let s = standard_line();
        let xs = harmonic(2000);
        let verdict = extract_violation_ranks(&s, &xs, 0.0, 0.5, 1, 1e-9).unwrap();
        let ext = match verdict {
            RankVerdict::Found(e) => e,
            RankVerdict::NoViolationFound => panic!("harmonic must violate"),
        };
        // Independent scan for j = 1: minimal n with some m in [1, n]
        // and H(n) - H(m) >= 0.5.
        let mut expect = None;
        'outer: for n in 1..xs.len() {
            for m in 1..=n {
                if xs[n] - xs[m] >= 0.5 {
                    expect = Some((m, n));
                    break 'outer;
                }
            }
        }
        assert_eq!(ext.pairs[0], expect.unwrap());
        assert!(ext.strict_bound_holds);
        assert!(ext.trailing_excess >= 0.0 && ext.trailing_excess < 0.05);
    }

    #[test]
    fn rank_extraction_on_cauchy_orbit() {
        let s = max_space();
        let trace = iterate(
            &s,
            &ScalarMap::Halving,
            1.0,
            &IterationBudget::default(),
            8,
        );
        let verdict =
            extract_violation_ranks(&s, &trace.points, 0.0, 0.5, 1, 1e-9).unwrap();
        assert_eq!(verdict, RankVerdict::NoViolationFound);
    }

    #[test]
    fn theorem1_halving_run() {
        let run = solve_theorem1(
            &max_space(),
            &ScalarMap::Halving,
            1.0,
            &IterationBudget::default(),
            1e-10,
            HypothesisRecord::assumed(),
        )
        .unwrap();
        assert!(run.conclusions.rho_descending);
        assert!(run.conclusions.alpha_settles);
        assert!(run.conclusions.delta_settles);
        assert!(run.certificate.point < 1e-10);
        assert!(run.certificate.d_self <= 1e-10);
        assert!(run.trace.points.len() <= 50);
    }

    #[test]
    fn theorem1_budget_exhaustion() {
        let err = solve_theorem1(
            &max_space(),
            &ScalarMap::Affine { a: 1.0, b: 1.0 },
            1.0,
            &IterationBudget {
                max_iter: 100,
                stop_tol: 1e-12,
            },
            1e-10,
            HypothesisRecord::assumed(),
        )
        .unwrap_err();
        assert_eq!(err, DynamicsError::BudgetExhausted);
    }

    #[test]
    fn fixed_structure_examples() {
        let s = table3();
        let constant = FiniteMap::constant(0, &s).unwrap();
        let fs = enumerate_fixed_structure(&s, &constant, 1e-9);
        assert_eq!(fs.fix_d, vec![0]);
        assert_eq!(fs.theta, Some(0.0));
        assert_eq!(fs.x_td, vec![0]);
        assert_eq!(fs.fix, vec![0]);

        let id = FiniteMap::identity(&s);
        let fs = enumerate_fixed_structure(&s, &id, 1e-9);
        assert_eq!(fs.fix_d, vec![0, 1, 2]);
        assert_eq!(fs.theta, Some(0.0));
        assert_eq!(fs.fix, vec![0, 1, 2]);

        let metric2 =
            FiniteSpace::from_table(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let swap = FiniteMap::new(vec![1, 0], &metric2).unwrap();
        let fs = enumerate_fixed_structure(&metric2, &swap, 1e-9);
        assert!(fs.fix_d.is_empty());
        assert_eq!(fs.theta, None);
        assert!(fs.x_td.is_empty());
    }

    #[test]
    fn theorem2_finite_constant_map() {
        let s = table3();
        let map = FiniteMap::constant(0, &s).unwrap();
        let (cert, fs) = solve_theorem2_finite(
            &s,
            &map,
            &Gauge::Linear(0.5),
            &ClassifyConfig::fast(),
            1e-9,
        )
        .unwrap();
        assert_eq!(cert.kind, CertificateKind::Theorem2Unique);
        assert_eq!(cert.point, 0);
        assert_eq!(cert.theta, Some(0.0));
        assert_eq!(fs.fix, vec![0]);
    }

    #[test]
    fn theorem2_continuous_halving() {
        let cert = solve_theorem2_continuous(
            &max_space(),
            &ScalarMap::Halving,
            &Gauge::Linear(0.5),
            &RegionSampler::default(),
            &IterationBudget::default(),
            &ClassifyConfig::fast(),
            1e-9,
            8,
        )
        .unwrap();
        assert_eq!(cert.kind, CertificateKind::Theorem2Unique);
        assert!(cert.point.abs() < 1e-9);
        assert!(cert.e_residual <= 1e-9);
        assert!(cert.theta.is_none());
    }

    #[test]
    fn theorem2_rejects_non_coercive_gauge() {
        let err = solve_theorem2_continuous(
            &max_space(),
            &ScalarMap::Halving,
            &Gauge::ExpSaturating,
            &RegionSampler::default(),
            &IterationBudget::default(),
            &ClassifyConfig::fast(),
            1e-9,
            8,
        )
        .unwrap_err();
        assert!(matches!(err, DynamicsError::HypothesisFailed { ref name } if name == "semi-coercive"));
    }
}
