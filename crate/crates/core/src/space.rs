//! Partial metric spaces: axioms, derived maps and generators.
//!
//! A symmetric `d: X x X -> R+` is a partial metric when it satisfies
//!
//! * symmetry: `d(x,y) = d(y,x)`
//! * reflexive-triangular: `d(x,z) <= d(x,y) + d(y,z) - d(y,y)`
//! * Matthews property: `max(d(x,x), d(y,y)) <= d(x,y)`
//! * weak sufficiency: `d(x,y) = d(x,x) = d(y,y)` implies `x = y`
//!
//! From `d` we derive `b(x,y) = (d(x,x)+d(y,y))/2`,
//! `c(x,y) = max(d(x,x), d(y,y))` and the induced metric
//! `e(x,y) = 2(d(x,y) - b(x,y))`, which is a standard metric on every
//! valid space.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Anything that evaluates a symmetric distance over its point type.
///
/// Finite spaces use table indices as points; continuous families use
/// reals or intervals. The derived maps [`b`], [`c`], [`e`] and all of
/// the dynamics are generic over this trait.
pub trait PartialMetric {
    type Point: Clone + PartialEq;

    fn d(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Self-distance shorthand.
    fn self_d(&self, x: &Self::Point) -> f64 {
        self.d(x, x)
    }
}

/// `b(x,y) = (1/2)(d(x,x) + d(y,y))`.
pub fn b<S: PartialMetric>(space: &S, x: &S::Point, y: &S::Point) -> f64 {
    0.5 * (space.self_d(x) + space.self_d(y))
}

/// `c(x,y) = max(d(x,x), d(y,y))`.
pub fn c<S: PartialMetric>(space: &S, x: &S::Point, y: &S::Point) -> f64 {
    space.self_d(x).max(space.self_d(y))
}

/// The induced metric `e(x,y) = 2(d(x,y) - b(x,y))`.
pub fn e<S: PartialMetric>(space: &S, x: &S::Point, y: &S::Point) -> f64 {
    2.0 * space.d(x, y) - space.self_d(x) - space.self_d(y)
}

/// Membership in the open d-sphere: `d(x,y) < d(x,x) + radius`.
pub fn sphere_contains<S: PartialMetric>(
    space: &S,
    center: &S::Point,
    radius: f64,
    candidate: &S::Point,
) -> Result<bool, SpaceError> {
    if !(radius > 0.0) {
        return Err(SpaceError::NonPositiveRadius { radius });
    }
    Ok(space.d(center, candidate) < space.self_d(center) + radius)
}

/// Errors raised while constructing or querying spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceError {
    /// The distance table is non-square, empty, or carries a negative
    /// or non-finite entry.
    MalformedTable { detail: String },
    /// A point index or label that the space does not contain.
    UnknownPoint { detail: String },
    /// The space fails the partial metric axioms, so a derived claim
    /// (e.g. Lemma-1 metricity of `e`) has a void hypothesis.
    InvalidSpace { detail: String },
    NonPositiveRadius { radius: f64 },
    BadParameter { detail: String },
}

impl core::fmt::Display for SpaceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpaceError::MalformedTable { detail } => write!(f, "malformed table: {detail}"),
            SpaceError::UnknownPoint { detail } => write!(f, "unknown point: {detail}"),
            SpaceError::InvalidSpace { detail } => write!(f, "invalid space: {detail}"),
            SpaceError::NonPositiveRadius { radius } => {
                write!(f, "sphere radius must be positive, got {radius}")
            }
            SpaceError::BadParameter { detail } => write!(f, "bad parameter: {detail}"),
        }
    }
}

impl core::error::Error for SpaceError {}

/// An explicit point set with a distance table claimed to be a partial
/// metric. Validity is checked by [`FiniteSpace::check_axioms`], never
/// assumed; the full table (both triangles) is stored so that broken
/// inputs stay diagnosable.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteSpace {
    labels: Vec<String>,
    dtable: Vec<Vec<f64>>,
}

impl PartialMetric for FiniteSpace {
    type Point = usize;

    fn d(&self, x: &usize, y: &usize) -> f64 {
        self.dtable[*x][*y]
    }
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>, dtable: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::MalformedTable {
                detail: String::from("empty point set"),
            });
        }
        if dtable.len() != n {
            return Err(SpaceError::MalformedTable {
                detail: alloc::format!("table has {} rows for {} labels", dtable.len(), n),
            });
        }
        for (i, row) in dtable.iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::MalformedTable {
                    detail: alloc::format!("row {i} has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(SpaceError::MalformedTable {
                        detail: alloc::format!("entry ({i},{j}) = {v} is not a finite non-negative real"),
                    });
                }
            }
        }
        Ok(FiniteSpace { labels, dtable })
    }

    /// Build with synthetic labels `p0..p{n-1}`.
    pub fn from_table(dtable: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let labels = (0..dtable.len()).map(|i| alloc::format!("p{i}")).collect();
        Self::new(labels, dtable)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty point sets
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.dtable
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SpaceError::UnknownPoint {
                detail: String::from(label),
            })
    }

    pub fn check_index(&self, i: usize) -> Result<(), SpaceError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(SpaceError::UnknownPoint {
                detail: alloc::format!("index {i} out of range for {} points", self.len()),
            })
        }
    }

    /// Verify the four partial-metric axioms exhaustively over all
    /// pairs/triples. Equality comparisons use the absolute tolerance
    /// `tol`.
    pub fn check_axioms(&self, tol: f64) -> AxiomReport {
        let n = self.len();
        let d = |i: usize, j: usize| self.dtable[i][j];

        // (b01) symmetry: margin is the negated worst asymmetry.
        let mut sym = AxiomCheck::trivial();
        for i in 0..n {
            for j in 0..n {
                let gap = -libm::fabs(d(i, j) - d(j, i));
                sym.observe(gap, [i, j, j]);
            }
        }
        sym.pass = sym.margin >= -tol;

        // (b02) reflexive-triangular: slack d(x,y)+d(y,z)-d(y,y)-d(x,z).
        let mut tri = AxiomCheck::trivial();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let slack = d(x, y) + d(y, z) - d(y, y) - d(x, z);
                    tri.observe(slack, [x, y, z]);
                }
            }
        }
        tri.pass = tri.margin >= -tol;

        // (b03) Matthews: slack d(x,y) - max(d(x,x), d(y,y)).
        let mut mat = AxiomCheck::trivial();
        for x in 0..n {
            for y in 0..n {
                let slack = d(x, y) - d(x, x).max(d(y, y));
                mat.observe(slack, [x, y, y]);
            }
        }
        mat.pass = mat.margin >= -tol;

        // (b04) weak sufficiency: for x != y, the triple equality
        // d(x,y)=d(x,x)=d(y,y) must not hold within tol. The margin is
        // how far the closest off-diagonal pair is from that equality;
        // it must exceed tol.
        let mut weak = AxiomCheck::trivial();
        weak.margin = f64::INFINITY;
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let gap = libm::fabs(d(x, y) - d(x, x)).max(libm::fabs(d(x, y) - d(y, y)));
                if gap < weak.margin {
                    weak.margin = gap;
                    weak.witness = Some([x, y, y]);
                }
            }
        }
        weak.pass = weak.margin > tol || weak.witness.is_none();

        AxiomReport {
            symmetry: sym,
            reflexive_triangular: tri,
            matthews: mat,
            weak_sufficiency: weak,
        }
    }

    /// Convenience: all four axioms pass at `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.check_axioms(tol).all_pass()
    }

    /// Full table of a derived map (`b`, `c`, or `e`).
    pub fn derived_table(&self, which: DerivedMap) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match which {
                        DerivedMap::B => b(self, &i, &j),
                        DerivedMap::C => c(self, &i, &j),
                        DerivedMap::E => e(self, &i, &j),
                    })
                    .collect()
            })
            .collect()
    }

    /// Verify that the induced `e` is a standard metric (symmetry,
    /// identity of indiscernibles within `tol`, triangle inequality)
    /// and that `|d(x,x) - d(y,y)| <= e(x,y)` holds on all pairs.
    ///
    /// Errors with `InvalidSpace` when the axioms fail: the claim's
    /// hypothesis is void there.
    pub fn check_e_metric(&self, tol: f64) -> Result<EMetricReport, SpaceError> {
        let axioms = self.check_axioms(tol);
        if !axioms.all_pass() {
            return Err(SpaceError::InvalidSpace {
                detail: String::from("partial metric axioms fail; e-metricity has a void hypothesis"),
            });
        }
        let n = self.len();
        let et = self.derived_table(DerivedMap::E);

        let mut report = EMetricReport {
            symmetry: AxiomCheck::trivial(),
            identity: AxiomCheck::trivial(),
            triangle: AxiomCheck::trivial(),
            self_distance_bound: AxiomCheck::trivial(),
        };
        for i in 0..n {
            for j in 0..n {
                report
                    .symmetry
                    .observe(-libm::fabs(et[i][j] - et[j][i]), [i, j, j]);
                // e(x,x) = 0 and e(x,y) > 0 for x != y.
                let id_slack = if i == j { -et[i][j] } else { et[i][j] - tol };
                report.identity.observe(id_slack, [i, j, j]);
                // Eq-style bound: |d(x,x) - d(y,y)| <= e(x,y).
                let bound = et[i][j] - libm::fabs(self.dtable[i][i] - self.dtable[j][j]);
                report.self_distance_bound.observe(bound, [i, j, j]);
                for k in 0..n {
                    report
                        .triangle
                        .observe(et[i][j] + et[j][k] - et[i][k], [i, j, k]);
                }
            }
        }
        report.symmetry.pass = report.symmetry.margin >= -tol;
        report.identity.pass = report.identity.margin >= -tol;
        report.triangle.pass = report.triangle.margin >= -tol;
        report.self_distance_bound.pass = report.self_distance_bound.margin >= -tol;
        Ok(report)
    }
}

/// Which derived map to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DerivedMap {
    B,
    C,
    E,
}

/// Verdict for one axiom: minimal slack over all tuples and the tuple
/// attaining it. `pass` holds when the margin clears the tolerance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxiomCheck {
    pub pass: bool,
    pub margin: f64,
    pub witness: Option<[usize; 3]>,
}

impl AxiomCheck {
    fn trivial() -> Self {
        AxiomCheck {
            pass: true,
            margin: f64::INFINITY,
            witness: None,
        }
    }

    fn observe(&mut self, slack: f64, tuple: [usize; 3]) {
        if slack < self.margin {
            self.margin = slack;
            self.witness = Some(tuple);
        }
    }
}

/// Per-axiom report of [`FiniteSpace::check_axioms`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxiomReport {
    pub symmetry: AxiomCheck,
    pub reflexive_triangular: AxiomCheck,
    pub matthews: AxiomCheck,
    pub weak_sufficiency: AxiomCheck,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.symmetry.pass
            && self.reflexive_triangular.pass
            && self.matthews.pass
            && self.weak_sufficiency.pass
    }
}

/// Report of [`FiniteSpace::check_e_metric`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EMetricReport {
    pub symmetry: AxiomCheck,
    pub identity: AxiomCheck,
    pub triangle: AxiomCheck,
    /// `|d(x,x) - d(y,y)| <= e(x,y)` on all pairs.
    pub self_distance_bound: AxiomCheck,
}

impl EMetricReport {
    pub fn all_pass(&self) -> bool {
        self.symmetry.pass && self.identity.pass && self.triangle.pass && self.self_distance_bound.pass
    }
}

/// Parameters for [`generate_random_space`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomSpaceParams {
    /// Weights are drawn uniformly from `[0, w_max]`.
    pub w_max: f64,
    /// Base points are drawn uniformly from `[0, scale]^2`.
    pub scale: f64,
}

impl Default for RandomSpaceParams {
    fn default() -> Self {
        RandomSpaceParams {
            w_max: 2.0,
            scale: 10.0,
        }
    }
}

/// Generate a random valid finite partial metric space as
/// `d(x,y) = m(x,y) + max(w(x), w(y))` from the Euclidean distances of
/// random plane points and random weights. The construction satisfies
/// all four axioms, so the generator never emits invalid spaces.
/// Deterministic in `(n, seed, params)`.
pub fn generate_random_space(
    n: usize,
    seed: u64,
    params: &RandomSpaceParams,
) -> Result<FiniteSpace, SpaceError> {
    if n == 0 {
        return Err(SpaceError::BadParameter {
            detail: String::from("point count must be at least 1"),
        });
    }
    if !(params.w_max >= 0.0) || !(params.scale > 0.0) {
        return Err(SpaceError::BadParameter {
            detail: alloc::format!("w_max = {}, scale = {}", params.w_max, params.scale),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.gen_range(0.0..params.scale),
                rng.gen_range(0.0..params.scale),
            )
        })
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=params.w_max)).collect();

    let mut dtable = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dx = pts[i].0 - pts[j].0;
            let dy = pts[i].1 - pts[j].1;
            let m = libm::sqrt(dx * dx + dy * dy);
            dtable[i][j] = m + weights[i].max(weights[j]);
        }
    }
    FiniteSpace::from_table(dtable)
}

/// Weight function for the continuous weighted family.
pub type WeightFn = alloc::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A named parametric family of partial metrics over the reals.
#[derive(Clone)]
pub enum ContinuousSpace {
    /// Points are non-negative reals; `d(x,y) = max(x,y)`.
    MaxOnRPlus,
    /// `d(x,y) = |x - y| + max(w(x), w(y))` for a weight `w >= 0` over
    /// the standard metric on the line.
    Weighted { weight: WeightFn },
}

impl core::fmt::Debug for ContinuousSpace {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ContinuousSpace::MaxOnRPlus => write!(f, "MaxOnRPlus"),
            ContinuousSpace::Weighted { .. } => write!(f, "Weighted {{ .. }}"),
        }
    }
}

impl PartialMetric for ContinuousSpace {
    type Point = f64;

    fn d(&self, x: &f64, y: &f64) -> f64 {
        match self {
            ContinuousSpace::MaxOnRPlus => x.max(*y),
            ContinuousSpace::Weighted { weight } => {
                libm::fabs(x - y) + weight(*x).max(weight(*y))
            }
        }
    }
}

/// Closed intervals `[a, b]` with `d([a,b],[c,d]) = max(b,d) - min(a,c)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntervalSpace;

/// A closed interval point `[lo, hi]`, `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SpaceError> {
        if lo <= hi && lo.is_finite() && hi.is_finite() {
            Ok(Interval { lo, hi })
        } else {
            Err(SpaceError::BadParameter {
                detail: alloc::format!("invalid interval [{lo}, {hi}]"),
            })
        }
    }
}

impl PartialMetric for IntervalSpace {
    type Point = Interval;

    fn d(&self, x: &Interval, y: &Interval) -> f64 {
        x.hi.max(y.hi) - x.lo.min(y.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// The 3-point table from m(x,y)+max(w(x),w(y)) with w=(0,1,2) and
    /// m = 1 off-diagonal; reused across the crate's tests.
    pub(crate) fn table3() -> FiniteSpace {
        FiniteSpace::from_table(vec![
            vec![0.0, 2.0, 3.0],
            vec![2.0, 1.0, 3.0],
            vec![3.0, 3.0, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn table3_passes_all_axioms() {
        let report = table3().check_axioms(1e-9);
        assert!(report.symmetry.pass);
        assert!(report.reflexive_triangular.pass);
        assert!(report.matthews.pass);
        assert!(report.weak_sufficiency.pass);
    }

    #[test]
    fn plain_metric_is_partial_metric() {
        let s = FiniteSpace::from_table(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(s.check_axioms(1e-9).all_pass());
    }

    #[test]
    fn matthews_violation_detected() {
        let s = FiniteSpace::from_table(vec![vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let report = s.check_axioms(1e-9);
        assert!(!report.matthews.pass);
        assert_eq!(report.matthews.witness, Some([0, 1, 1]));
        assert!((report.matthews.margin - (1.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(matches!(
            FiniteSpace::from_table(vec![vec![0.0, 1.0]]),
            Err(SpaceError::MalformedTable { .. })
        ));
        assert!(matches!(
            FiniteSpace::from_table(vec![vec![-1.0]]),
            Err(SpaceError::MalformedTable { .. })
        ));
        assert!(matches!(
            FiniteSpace::from_table(vec![vec![f64::NAN]]),
            Err(SpaceError::MalformedTable { .. })
        ));
        assert!(matches!(
            FiniteSpace::from_table(vec![]),
            Err(SpaceError::MalformedTable { .. })
        ));
    }

    #[test]
    fn derived_maps_on_max_space() {
        let s = ContinuousSpace::MaxOnRPlus;
        // e reduces to |x - y| under max.
        assert_eq!(e(&s, &3.0, &1.0), 2.0);
        assert_eq!(e(&s, &1.0, &1.0), 0.0);
        assert_eq!(b(&s, &3.0, &1.0), 2.0);
        assert_eq!(c(&s, &3.0, &1.0), 3.0);
    }

    #[test]
    fn derived_maps_on_table3() {
        let s = table3();
        assert_eq!(e(&s, &0, &1), 2.0 * 2.0 - 0.0 - 1.0);
        assert_eq!(b(&s, &0, &1), 0.5);
        assert_eq!(c(&s, &0, &1), 1.0);
    }

    #[test]
    fn e_is_metric_on_table3() {
        let report = table3().check_e_metric(1e-9).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn e_metric_check_rejects_invalid_space() {
        let s = FiniteSpace::from_table(vec![vec![2.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            s.check_e_metric(1e-9),
            Err(SpaceError::InvalidSpace { .. })
        ));
    }

    #[test]
    fn e_doubles_a_standard_metric() {
        // Zero diagonal: e(x,y) = 2 d(x,y) exactly.
        let s = FiniteSpace::from_table(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.5],
            vec![2.0, 1.5, 0.0],
        ])
        .unwrap();
        let et = s.derived_table(DerivedMap::E);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(et[i][j], 2.0 * s.d(&i, &j));
            }
        }
    }

    #[test]
    fn sphere_membership() {
        let s = ContinuousSpace::MaxOnRPlus;
        assert!(sphere_contains(&s, &1.0, 0.5, &1.2).unwrap());
        assert!(!sphere_contains(&s, &1.0, 0.5, &2.0).unwrap());
        assert!(sphere_contains(&s, &1.0, 1e-12, &1.0).unwrap());
        assert!(matches!(
            sphere_contains(&s, &1.0, 0.0, &1.0),
            Err(SpaceError::NonPositiveRadius { .. })
        ));
    }

    #[test]
    fn random_space_deterministic_and_valid() {
        let params = RandomSpaceParams::default();
        let a = generate_random_space(3, 42, &params).unwrap();
        let b = generate_random_space(3, 42, &params).unwrap();
        assert_eq!(a, b);
        assert!(a.is_valid(1e-9));

        let one = generate_random_space(1, 7, &params).unwrap();
        assert_eq!(one.len(), 1);
        // Single point: the table is [[w0]].
        assert!(one.d(&0, &0) >= 0.0 && one.d(&0, &0) <= params.w_max);
    }

    #[test]
    fn interval_space_distance() {
        let s = IntervalSpace;
        let x = Interval::new(0.0, 2.0).unwrap();
        let y = Interval::new(1.0, 3.0).unwrap();
        assert_eq!(s.d(&x, &y), 3.0);
        assert_eq!(s.d(&x, &x), 2.0);
        assert!(Interval::new(2.0, 1.0).is_err());
    }
}
