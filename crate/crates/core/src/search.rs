//! Seeded randomized validation campaigns.
//!
//! A trial draws a random finite space, self-map and gauge from a
//! [`TrialSpec`], machine-checks the hypotheses (space axioms,
//! contractivity, gauge classes), and for hypothesis-passing trials
//! asserts the fixed-point conclusions: `X(T;d)` is contained in
//! `Fix(T)`, `Fix(T)` has at most one element and is a nonempty
//! singleton equal to `X(T;d)`, and the d-fixed-point identities hold
//! at every d-fixed point. Any failed assertion is a recorded
//! violation, never a panic.
//!
//! An *ablation* drops one named hypothesis from enforcement (and, for
//! the Matthews axiom, deliberately breaks the table) so that failure
//! modes can be exhibited and counted rather than filtered out.
//!
//! Everything is deterministic in the seed: per-trial seeds derive
//! from the base seed and trial index, so any execution order produces
//! the same report.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contraction::{
    fixed_point_identities, verify_contractive_finite, verify_contractive_unchecked, FiniteMap,
    GKind,
};
use crate::dynamics::enumerate_fixed_structure;
use crate::gauge::{classify, ClassifyConfig, Gauge};
use crate::space::{generate_random_space, FiniteSpace, PartialMetric, RandomSpaceParams, SpaceError};

/// How the self-map of a trial is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum MapSampler {
    /// Uniform random index table. Rarely contractive; useful for
    /// measuring the raw hypothesis-pass rate.
    Uniform,
    /// Compose a uniform draw with pull-toward-min-self-distance
    /// steps: each point is redirected to the self-distance argmin
    /// with probability `pull`. Keeps the hypothesis-pass rate high
    /// enough for campaigns to be informative.
    ContractionBiased { pull: f64 },
}

/// How the gauge of a trial is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "family"))]
pub enum GaugeSampler {
    /// `phi(t) = alpha t` with `alpha` uniform in `[alpha_min, alpha_max]`.
    Linear { alpha_min: f64, alpha_max: f64 },
    Rational,
    ExpSaturating,
}

/// A named hypothesis that an ablated trial stops enforcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Ablation {
    /// Skip the axiom check and deliberately break the Matthews
    /// property of the generated table.
    Matthews,
    /// Skip the contractivity check.
    Contractive,
    /// Skip the limit-normality requirement on the gauge.
    LimitNormal,
    /// Skip the semi-coercivity requirement on the residual gauge.
    SemiCoercive,
}

/// Full description of one trial; determines it reproducibly.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialSpec {
    pub seed: u64,
    /// Number of points of the generated space.
    pub n: usize,
    /// Weight cap of the random-space generator.
    pub w_max: f64,
    pub map_sampler: MapSampler,
    pub gauge: GaugeSampler,
    pub g: GKind,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ablation: Option<Ablation>,
}

impl TrialSpec {
    pub fn validate(&self) -> Result<(), SpaceError> {
        if self.n == 0 {
            return Err(SpaceError::BadParameter {
                detail: String::from("trial space must have at least one point"),
            });
        }
        if !(self.w_max >= 0.0 && self.w_max.is_finite()) {
            return Err(SpaceError::BadParameter {
                detail: String::from("w_max must be finite and nonnegative"),
            });
        }
        if let MapSampler::ContractionBiased { pull } = self.map_sampler {
            if !(0.0..=1.0).contains(&pull) {
                return Err(SpaceError::BadParameter {
                    detail: String::from("pull probability must lie in [0, 1]"),
                });
            }
        }
        if let GaugeSampler::Linear {
            alpha_min,
            alpha_max,
        } = self.gauge
        {
            if !(0.0 <= alpha_min && alpha_min <= alpha_max && alpha_max < 1.0) {
                return Err(SpaceError::BadParameter {
                    detail: String::from("linear gauge range must satisfy 0 <= lo <= hi < 1"),
                });
            }
        }
        Ok(())
    }
}

/// Witness data of a conclusion violation, sufficient to replay.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ViolationWitness {
    pub spec: TrialSpec,
    pub which: String,
    pub fix: Vec<usize>,
    pub x_td: Vec<usize>,
}

/// What a single trial produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "outcome"))]
pub enum TrialOutcome {
    /// Some enforced hypothesis failed; named in order of checking.
    HypothesesFailed { which: String },
    Pass,
    Violation { witness: ViolationWitness },
}

/// Aggregate of a campaign.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchReport {
    pub trials: usize,
    pub hypothesis_passes: usize,
    pub violations: Vec<ViolationWitness>,
    /// Trials where the ablated hypothesis would in fact have failed.
    pub ablated_hypothesis_failures: usize,
}

impl SearchReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sample_map(spec: &TrialSpec, space: &FiniteSpace, rng: &mut ChaCha8Rng) -> FiniteMap {
    let n = space.len();
    let mut table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    if let MapSampler::ContractionBiased { pull } = spec.map_sampler {
        let argmin = (0..n)
            .min_by(|&a, &b| {
                space
                    .d(&a, &a)
                    .partial_cmp(&space.d(&b, &b))
                    .expect("finite self-distances")
            })
            .expect("nonempty space");
        for slot in table.iter_mut() {
            if rng.gen_bool(pull) {
                *slot = argmin;
            }
        }
    }
    FiniteMap::new(table, space).expect("indices drawn in range")
}

fn sample_gauge(spec: &TrialSpec, rng: &mut ChaCha8Rng) -> Gauge {
    match spec.gauge {
        GaugeSampler::Linear {
            alpha_min,
            alpha_max,
        } => {
            let alpha = if alpha_min == alpha_max {
                alpha_min
            } else {
                rng.gen_range(alpha_min..alpha_max)
            };
            Gauge::Linear(alpha)
        }
        GaugeSampler::Rational => Gauge::Rational,
        GaugeSampler::ExpSaturating => Gauge::ExpSaturating,
    }
}

/// Raise one diagonal entry above an off-diagonal entry so the
/// Matthews property fails (possible only for n >= 2).
fn break_matthews(space: &FiniteSpace) -> FiniteSpace {
    let mut table = space.table().to_vec();
    if table.len() >= 2 {
        table[0][0] = table[0][1] + 1.0;
    }
    FiniteSpace::from_table(table).expect("still a well-formed table")
}

/// Run one trial. All abnormal paths are outcomes; `Err` only signals
/// a malformed spec.
pub fn run_trial(spec: &TrialSpec, tol: f64) -> Result<TrialOutcome, SpaceError> {
    spec.validate()?;
    // Independent sub-streams per concern, all derived from the seed.
    let mut space = generate_random_space(
        spec.n,
        spec.seed,
        &RandomSpaceParams {
            w_max: spec.w_max,
            ..RandomSpaceParams::default()
        },
    )?;
    let mut map_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6d61_7073); // "maps"
    let mut gauge_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6761_7567); // "gaug"

    if spec.ablation == Some(Ablation::Matthews) {
        space = break_matthews(&space);
    } else if !space.is_valid(tol) {
        // The generator guarantees validity; reaching this is a bug.
        return Ok(TrialOutcome::HypothesesFailed {
            which: String::from("space axioms"),
        });
    }

    let map = sample_map(spec, &space, &mut map_rng);
    let gauge = sample_gauge(spec, &mut gauge_rng);

    let contraction = if spec.ablation == Some(Ablation::Matthews) {
        verify_contractive_unchecked(&space, &map, &gauge, spec.g, tol)
    } else {
        verify_contractive_finite(&space, &map, &gauge, spec.g, tol)
    };
    let contraction = match contraction {
        Ok(r) => r,
        Err(_) => {
            return Ok(TrialOutcome::HypothesesFailed {
                which: String::from("contractivity check errored"),
            })
        }
    };
    if !contraction.pass && spec.ablation != Some(Ablation::Contractive) {
        return Ok(TrialOutcome::HypothesesFailed {
            which: String::from("contractive"),
        });
    }

    let classes = match classify(&gauge, &ClassifyConfig::fast()) {
        Ok(c) => c,
        Err(_) => {
            return Ok(TrialOutcome::HypothesesFailed {
                which: String::from("gauge classification errored"),
            })
        }
    };
    if !classes.normal.pass {
        return Ok(TrialOutcome::HypothesesFailed {
            which: String::from("normal"),
        });
    }
    if !classes.limit_normal.pass && spec.ablation != Some(Ablation::LimitNormal) {
        return Ok(TrialOutcome::HypothesesFailed {
            which: String::from("limit-normal"),
        });
    }
    if !classes.psi_semi_coercive.pass && spec.ablation != Some(Ablation::SemiCoercive) {
        return Ok(TrialOutcome::HypothesesFailed {
            which: String::from("semi-coercive"),
        });
    }

    // Hypotheses hold (minus any ablated one): assert the conclusions.
    let structure = enumerate_fixed_structure(&space, &map, tol);
    let witness = |which: &str| ViolationWitness {
        spec: spec.clone(),
        which: String::from(which),
        fix: structure.fix.clone(),
        x_td: structure.x_td.clone(),
    };
    if !structure.x_td_subset_of_fix() {
        return Ok(TrialOutcome::Violation {
            witness: witness("X(T;d) not contained in Fix(T)"),
        });
    }
    if structure.fix.len() > 1 {
        return Ok(TrialOutcome::Violation {
            witness: witness("Fix(T) has more than one element"),
        });
    }
    if structure.fix.is_empty() {
        return Ok(TrialOutcome::Violation {
            witness: witness("Fix(T) is empty"),
        });
    }
    if structure.x_td != structure.fix {
        return Ok(TrialOutcome::Violation {
            witness: witness("X(T;d) differs from Fix(T)"),
        });
    }
    // d-fixed-point identities at every (z, w) in Fix(T;d).
    let probes: Vec<usize> = (0..space.len()).collect();
    for &z in &structure.fix_d {
        for &w in &structure.fix_d {
            let ids = fixed_point_identities(&space, &map, &z, &w, &probes, tol);
            if !(ids.self_distance_drop.pass && ids.e_residual.pass && ids.m_collapses.pass) {
                return Ok(TrialOutcome::Violation {
                    witness: witness("d-fixed-point identity failed"),
                });
            }
        }
    }
    Ok(TrialOutcome::Pass)
}

/// Run `count` trials with seeds `base.seed + 0 .. base.seed + count - 1`
/// and fold the outcomes. Trials are independent; per-trial seeds make
/// the report order-insensitive.
pub fn run_campaign(base: &TrialSpec, count: usize, tol: f64) -> Result<SearchReport, SpaceError> {
    if count == 0 {
        return Err(SpaceError::BadParameter {
            detail: String::from("campaign needs at least one trial"),
        });
    }
    base.validate()?;
    let mut report = SearchReport {
        trials: count,
        hypothesis_passes: 0,
        violations: Vec::new(),
        ablated_hypothesis_failures: 0,
    };
    for i in 0..count as u64 {
        let spec = TrialSpec {
            seed: base.seed.wrapping_add(i),
            ..base.clone()
        };
        match run_trial(&spec, tol)? {
            TrialOutcome::HypothesesFailed { .. } => {}
            TrialOutcome::Pass => report.hypothesis_passes += 1,
            TrialOutcome::Violation { witness } => {
                report.hypothesis_passes += 1;
                if spec.ablation.is_some() {
                    report.ablated_hypothesis_failures += 1;
                }
                report.violations.push(witness);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec() -> TrialSpec {
        TrialSpec {
            seed: 7,
            n: 4,
            w_max: 2.0,
            map_sampler: MapSampler::ContractionBiased { pull: 0.7 },
            gauge: GaugeSampler::Linear {
                alpha_min: 0.0,
                alpha_max: 0.9,
            },
            g: GKind::B,
            ablation: None,
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let spec = base_spec();
        let a = run_trial(&spec, 1e-9).unwrap();
        let b = run_trial(&spec, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_point_space_passes() {
        let spec = TrialSpec {
            n: 1,
            map_sampler: MapSampler::Uniform,
            ..base_spec()
        };
        assert_eq!(run_trial(&spec, 1e-9).unwrap(), TrialOutcome::Pass);
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = TrialSpec { n: 0, ..base_spec() };
        assert!(run_trial(&spec, 1e-9).is_err());
        assert!(run_campaign(&base_spec(), 0, 1e-9).is_err());
    }

    #[test]
    fn campaign_of_one_reproduces_trial() {
        let spec = base_spec();
        let report = run_campaign(&spec, 1, 1e-9).unwrap();
        let single = run_trial(&spec, 1e-9).unwrap();
        assert_eq!(report.trials, 1);
        match single {
            TrialOutcome::Pass => assert_eq!(report.hypothesis_passes, 1),
            TrialOutcome::HypothesesFailed { .. } => assert_eq!(report.hypothesis_passes, 0),
            TrialOutcome::Violation { .. } => assert!(!report.clean()),
        }
    }

    #[test]
    fn campaign_is_deterministic_and_clean() {
        let spec = base_spec();
        let a = run_campaign(&spec, 50, 1e-9).unwrap();
        let b = run_campaign(&spec, 50, 1e-9).unwrap();
        assert_eq!(a, b);
        assert!(a.clean());
        // The biased sampler must keep campaigns non-vacuous.
        assert!(a.hypothesis_passes * 5 >= a.trials);
    }

    #[test]
    fn b_passes_are_c_passes() {
        // Monotone filter: b <= c pointwise, so any (M;b;phi) pass is
        // an (M;c;phi) pass on the identical trial.
        for i in 0..30u64 {
            let sb = TrialSpec {
                seed: 100 + i,
                ..base_spec()
            };
            let sc = TrialSpec {
                g: GKind::C,
                ..sb.clone()
            };
            if run_trial(&sb, 1e-9).unwrap() == TrialOutcome::Pass {
                assert_eq!(run_trial(&sc, 1e-9).unwrap(), TrialOutcome::Pass);
            }
        }
    }

    #[test]
    fn matthews_ablation_runs_and_records() {
        let spec = TrialSpec {
            ablation: Some(Ablation::Matthews),
            ..base_spec()
        };
        // Must not error: the broken table bypasses the axiom gate.
        let report = run_campaign(&spec, 20, 1e-9).unwrap();
        assert_eq!(report.trials, 20);
    }

    #[test]
    fn uniform_sampler_pass_rate_is_low() {
        let spec = TrialSpec {
            map_sampler: MapSampler::Uniform,
            ..base_spec()
        };
        let biased = base_spec();
        let ru = run_campaign(&spec, 100, 1e-9).unwrap();
        let rb = run_campaign(&biased, 100, 1e-9).unwrap();
        assert!(rb.hypothesis_passes > ru.hypothesis_passes);
    }
}
