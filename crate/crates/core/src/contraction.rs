//! Comparison quantities and the functional contractive condition.
//!
//! For a self-map `T` put
//!
//! * `M1(x,y) = max(d(x,y), d(x,Tx), d(y,Ty))`
//! * `M2(x,y) = (d(x,Ty) + d(Tx,y)) / 2`
//! * `M3(x,y) = max(M1, M2)`
//!
//! and call `T` `(M;g;phi)`-contractive for a gauge `phi` and
//! `g` in `{b, c}` when `d(Tx,Ty) <= max(phi(M3(x,y)), g(x,y))` holds
//! on all pairs. Finite spaces are checked exhaustively over ordered
//! pairs; continuous spaces over a deterministic sampler, with the
//! verdict labeled as sampled.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauge::{Gauge, GaugeError};
use crate::space::{self, ContinuousSpace, FiniteSpace, PartialMetric, SpaceError};

/// A self-map of a space's point type.
pub trait SelfMap<P> {
    fn apply(&self, x: &P) -> P;

    fn apply_n(&self, x: &P, n: usize) -> P
    where
        P: Clone,
    {
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        cur
    }
}

/// Index table `i -> T(i)` over a finite space.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteMap {
    table: Vec<usize>,
}

impl FiniteMap {
    pub fn new(table: Vec<usize>, space: &FiniteSpace) -> Result<Self, SpaceError> {
        if table.len() != space.len() {
            return Err(SpaceError::BadParameter {
                detail: alloc::format!(
                    "map table length {} does not match point count {}",
                    table.len(),
                    space.len()
                ),
            });
        }
        for (i, &j) in table.iter().enumerate() {
            if j >= space.len() {
                return Err(SpaceError::UnknownPoint {
                    detail: alloc::format!("map sends {i} to out-of-range index {j}"),
                });
            }
        }
        Ok(FiniteMap { table })
    }

    pub fn constant(target: usize, space: &FiniteSpace) -> Result<Self, SpaceError> {
        Self::new(alloc::vec![target; space.len()], space)
    }

    pub fn identity(space: &FiniteSpace) -> Self {
        FiniteMap {
            table: (0..space.len()).collect(),
        }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

impl SelfMap<usize> for FiniteMap {
    fn apply(&self, x: &usize) -> usize {
        self.table[*x]
    }
}

/// Evaluation closure for user-defined scalar maps.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Self-maps over scalar continuous spaces.
#[derive(Clone)]
pub enum ScalarMap {
    /// `x -> x / 2`.
    Halving,
    /// `x -> a x + b`.
    Affine { a: f64, b: f64 },
    Custom { name: String, f: ScalarFn },
}

impl core::fmt::Debug for ScalarMap {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScalarMap::Halving => write!(f, "Halving"),
            ScalarMap::Affine { a, b } => write!(f, "Affine {{ a: {a}, b: {b} }}"),
            ScalarMap::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl SelfMap<f64> for ScalarMap {
    fn apply(&self, x: &f64) -> f64 {
        match self {
            ScalarMap::Halving => x / 2.0,
            ScalarMap::Affine { a, b } => a * x + b,
            ScalarMap::Custom { f, .. } => f(*x),
        }
    }
}

/// The three comparison quantities at a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MQuantities {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

/// Compute `(M1, M2, M3)` at `(x, y)`.
pub fn m_quantities<S, M>(space: &S, map: &M, x: &S::Point, y: &S::Point) -> MQuantities
where
    S: PartialMetric,
    M: SelfMap<S::Point>,
{
    let tx = map.apply(x);
    let ty = map.apply(y);
    let m1 = space.d(x, y).max(space.d(x, &tx)).max(space.d(y, &ty));
    let m2 = 0.5 * (space.d(x, &ty) + space.d(&tx, y));
    MQuantities {
        m1,
        m2,
        m3: m1.max(m2),
    }
}

/// Which of `b`, `c` plays the role of `g` in the contractive
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum GKind {
    B,
    C,
}

impl GKind {
    pub fn eval<S: PartialMetric>(self, space: &S, x: &S::Point, y: &S::Point) -> f64 {
        match self {
            GKind::B => space::b(space, x, y),
            GKind::C => space::c(space, x, y),
        }
    }
}

/// Verdict of a contractivity check: the worst signed margin
/// `max(phi(M3(x,y)), g(x,y)) - d(Tx,Ty)` over all checked pairs, the
/// pair attaining it, and how often each branch of the max dominated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ContractionReport<P> {
    pub pass: bool,
    pub worst_margin: f64,
    pub witness: Option<(P, P)>,
    pub phi_branch: usize,
    pub g_branch: usize,
    pub pairs_checked: usize,
    /// False when the verdict comes from a sampler rather than an
    /// exhaustive pair scan.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContractionError {
    Space(SpaceError),
    Gauge(GaugeError),
}

impl core::fmt::Display for ContractionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ContractionError::Space(e) => write!(f, "{e}"),
            ContractionError::Gauge(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ContractionError {}

impl From<SpaceError> for ContractionError {
    fn from(e: SpaceError) -> Self {
        ContractionError::Space(e)
    }
}

impl From<GaugeError> for ContractionError {
    fn from(e: GaugeError) -> Self {
        ContractionError::Gauge(e)
    }
}

fn check_pairs<S, M, I>(
    space: &S,
    map: &M,
    gauge: &Gauge,
    g: GKind,
    tol: f64,
    pairs: I,
    exhaustive: bool,
) -> Result<ContractionReport<S::Point>, ContractionError>
where
    S: PartialMetric,
    M: SelfMap<S::Point>,
    I: Iterator<Item = (S::Point, S::Point)>,
{
    let mut report = ContractionReport {
        pass: true,
        worst_margin: f64::INFINITY,
        witness: None,
        phi_branch: 0,
        g_branch: 0,
        pairs_checked: 0,
        exhaustive,
    };
    for (x, y) in pairs {
        let m = m_quantities(space, map, &x, &y);
        let phi_m = gauge.eval(m.m3)?;
        let g_xy = g.eval(space, &x, &y);
        if phi_m >= g_xy {
            report.phi_branch += 1;
        } else {
            report.g_branch += 1;
        }
        let tx = map.apply(&x);
        let ty = map.apply(&y);
        let margin = phi_m.max(g_xy) - space.d(&tx, &ty);
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.witness = Some((x, y));
        }
        report.pairs_checked += 1;
    }
    report.pass = report.worst_margin >= -tol;
    Ok(report)
}

/// Exhaustive contractivity check over all ordered pairs of a finite
/// space. Errors with `InvalidSpace` when the axioms fail at `tol`.
pub fn verify_contractive_finite(
    space: &FiniteSpace,
    map: &FiniteMap,
    gauge: &Gauge,
    g: GKind,
    tol: f64,
) -> Result<ContractionReport<usize>, ContractionError> {
    if !space.is_valid(tol) {
        return Err(ContractionError::Space(SpaceError::InvalidSpace {
            detail: String::from("contractivity is checked over valid partial metrics only"),
        }));
    }
    let n = space.len();
    let pairs = (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
    check_pairs(space, map, gauge, g, tol, pairs, true)
}

/// As `verify_contractive_finite` but without the axiom gate, for
/// deliberately broken tables in ablation studies.
pub fn verify_contractive_unchecked(
    space: &FiniteSpace,
    map: &FiniteMap,
    gauge: &Gauge,
    g: GKind,
    tol: f64,
) -> Result<ContractionReport<usize>, ContractionError> {
    let n = space.len();
    let pairs = (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
    check_pairs(space, map, gauge, g, tol, pairs, true)
}

/// Deterministic pair sampler over a bounded scalar region: all pairs
/// of an evenly spaced grid plus seeded uniform pairs, so failures are
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionSampler {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for RegionSampler {
    fn default() -> Self {
        RegionSampler {
            lo: 0.0,
            hi: 1.0,
            grid_points: 64,
            random_pairs: 10_000,
            seed: 0,
        }
    }
}

impl RegionSampler {
    pub fn pairs(&self) -> Result<Vec<(f64, f64)>, SpaceError> {
        if !(self.hi > self.lo) || self.grid_points < 2 {
            return Err(SpaceError::BadParameter {
                detail: alloc::format!(
                    "region [{}, {}] with {} grid points",
                    self.lo,
                    self.hi,
                    self.grid_points
                ),
            });
        }
        let n = self.grid_points;
        let grid: Vec<f64> = (0..n)
            .map(|i| self.lo + (self.hi - self.lo) * (i as f64) / ((n - 1) as f64))
            .collect();
        let mut out = Vec::with_capacity(n * n + self.random_pairs);
        for &x in &grid {
            for &y in &grid {
                out.push((x, y));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_pairs {
            out.push((
                rng.gen_range(self.lo..=self.hi),
                rng.gen_range(self.lo..=self.hi),
            ));
        }
        Ok(out)
    }

    /// Evenly spread starting points for multi-start solves.
    pub fn starts(&self, count: usize) -> Vec<f64> {
        let c = count.max(1);
        (0..c)
            .map(|i| self.lo + (self.hi - self.lo) * (i as f64 + 0.5) / (c as f64))
            .collect()
    }
}

/// Sampled contractivity check over a scalar continuous space. The
/// verdict is labeled non-exhaustive.
pub fn verify_contractive_sampled(
    space: &ContinuousSpace,
    map: &ScalarMap,
    gauge: &Gauge,
    g: GKind,
    tol: f64,
    sampler: &RegionSampler,
) -> Result<ContractionReport<f64>, ContractionError> {
    let pairs = sampler.pairs()?;
    check_pairs(space, map, gauge, g, tol, pairs.into_iter(), false)
}

/// One checked identity: both sides and the verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn le(lhs: f64, rhs: f64, tol: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            pass: lhs <= rhs + tol,
        }
    }

    fn eq(lhs: f64, rhs: f64, tol: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            pass: libm::fabs(lhs - rhs) <= tol,
        }
    }
}

/// Report of the d-fixed-point identities for `z, w` in `Fix(T;d)`:
///
/// * `d(Tz,Tz) <= d(z,z)`
/// * `d(y,Tz) <= d(y,z)` for every probe `y`
/// * `e(z,Tz) = d(z,z) - d(Tz,Tz)`
/// * `M3(z,w) = d(z,w)`
///
/// The precondition is reported, not asserted: `z_is_d_fixed` /
/// `w_is_d_fixed` record whether `d(.,T.) = d(.,.)` held within `tol`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FixedPointIdentities {
    pub z_is_d_fixed: bool,
    pub w_is_d_fixed: bool,
    pub self_distance_drop: IdentityCheck,
    pub pull_toward_image: IdentityCheck,
    pub e_residual: IdentityCheck,
    pub m_collapses: IdentityCheck,
}

impl FixedPointIdentities {
    pub fn all_pass(&self) -> bool {
        self.self_distance_drop.pass
            && self.pull_toward_image.pass
            && self.e_residual.pass
            && self.m_collapses.pass
    }
}

/// Check the d-fixed-point identities at `(z, w)`, probing the
/// pull-toward-image inequality over `probes` (all points, for finite
/// spaces).
pub fn fixed_point_identities<S, M>(
    space: &S,
    map: &M,
    z: &S::Point,
    w: &S::Point,
    probes: &[S::Point],
    tol: f64,
) -> FixedPointIdentities
where
    S: PartialMetric,
    M: SelfMap<S::Point>,
{
    let tz = map.apply(z);
    let tw = map.apply(w);
    let z_is_d_fixed = libm::fabs(space.d(z, &tz) - space.self_d(z)) <= tol;
    let w_is_d_fixed = libm::fabs(space.d(w, &tw) - space.self_d(w)) <= tol;

    let drop = IdentityCheck::le(space.d(&tz, &tz), space.self_d(z), tol);

    let mut worst_lhs = f64::NEG_INFINITY;
    let mut worst_rhs = f64::INFINITY;
    let mut pull_pass = true;
    for y in probes {
        let lhs = space.d(y, &tz);
        let rhs = space.d(y, z);
        if lhs - rhs > worst_lhs - worst_rhs {
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
        pull_pass &= lhs <= rhs + tol;
    }
    let pull = IdentityCheck {
        lhs: if probes.is_empty() { 0.0 } else { worst_lhs },
        rhs: if probes.is_empty() { 0.0 } else { worst_rhs },
        pass: pull_pass,
    };

    let e_res = IdentityCheck::eq(
        space::e(space, z, &tz),
        space.self_d(z) - space.d(&tz, &tz),
        tol,
    );
    let m = m_quantities(space, map, z, w);
    let m_eq = IdentityCheck::eq(m.m3, space.d(z, w), tol);

    FixedPointIdentities {
        z_is_d_fixed,
        w_is_d_fixed,
        self_distance_drop: drop,
        pull_toward_image: pull,
        e_residual: e_res,
        m_collapses: m_eq,
    }
}
