//! Acceptance suite: one test per criterion, each printing a single
//! PASS line (visible with `--nocapture`). Every numeric claim is
//! checked against an oracle computed independently in this file.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use pmetric_core::contraction::{
    m_quantities, verify_contractive_finite, verify_contractive_sampled, FiniteMap, GKind,
    RegionSampler, ScalarMap, SelfMap,
};
use pmetric_core::dynamics::{
    diagnose_e_cauchy, diagnose_e_convergence, diagnose_semi_cauchy, enumerate_fixed_structure,
    solve_theorem1, solve_theorem2_finite, HypothesisRecord, HypothesisStatus, IterationBudget,
    RankVerdict,
};
use pmetric_core::gauge::{classify, limsup_right, ClassifyConfig, Gauge};
use pmetric_core::space::{
    self, generate_random_space, ContinuousSpace, FiniteSpace, PartialMetric, RandomSpaceParams,
};

const TOL: f64 = 1e-9;

fn random_space(n: usize, seed: u64) -> FiniteSpace {
    generate_random_space(n, seed, &RandomSpaceParams::default()).unwrap()
}

/// The real line as a partial metric space with zero self-distances.
fn line() -> ContinuousSpace {
    ContinuousSpace::Weighted {
        weight: Arc::new(|_| 0.0),
    }
}

fn harmonic(terms: usize) -> Vec<f64> {
    let mut h = 0.0;
    (1..=terms)
        .map(|n| {
            h += 1.0 / n as f64;
            h
        })
        .collect()
}

#[test]
fn criterion_1_induced_metric_suite() {
    // >= 1000 generated spaces, n <= 8: e is a metric and the
    // self-distance gap bound holds on all pairs at 1e-9.
    let mut checked = 0;
    for seed in 0..125u64 {
        for n in 1..=8usize {
            let s = random_space(n, seed * 8 + n as u64);
            assert!(s.check_e_metric(TOL).unwrap().all_pass(), "seed {seed} n {n}");
            for i in 0..n {
                for j in 0..n {
                    let gap = (s.d(&i, &i) - s.d(&j, &j)).abs();
                    assert!(gap <= space::e(&s, &i, &j) + TOL);
                }
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
    println!("criterion 1 (induced-metric suite, {checked} spaces): PASS");
}

#[test]
fn criterion_2_convergence_cross_checks() {
    let max = ContinuousSpace::MaxOnRPlus;
    let mut corpus: Vec<(Vec<f64>, &ContinuousSpace, f64)> = Vec::new();
    let ln = line();

    // 20 convergent geometric prefixes over the max space.
    for k in 0..20 {
        let limit = 0.5 + 0.25 * k as f64;
        let xs: Vec<f64> = (0..400).map(|n| limit + 0.8f64.powi(n)).collect();
        corpus.push((xs, &max, 1e-3));
    }
    // 10 Cauchy prefixes tested against wrong candidates below.
    for k in 0..10 {
        let limit = 2.0 + 0.1 * k as f64;
        let xs: Vec<f64> = (0..400).map(|n| limit + 0.9f64.powi(n)).collect();
        corpus.push((xs, &max, 1e-3));
    }
    // 10 semi-Cauchy-not-Cauchy prefixes on the line.
    for k in 0..10 {
        let c = 1.0 + 0.3 * k as f64;
        let xs: Vec<f64> = harmonic(2000).iter().map(|h| c * h).collect();
        corpus.push((xs, &ln, 1e-3));
    }
    // 10 constant prefixes.
    for k in 0..10 {
        corpus.push((vec![k as f64; 100], &max, 1e-9));
    }
    assert!(corpus.len() >= 50);

    for (idx, (xs, sp, tol)) in corpus.iter().enumerate() {
        // Dual characterization of the e-Cauchy property.
        let c = diagnose_e_cauchy(*sp, xs, *tol, 100).unwrap();
        assert!(c.agree, "prefix {idx}: e-Cauchy verdicts disagree");
        // Dual characterization of e-convergence: right candidate for
        // convergent prefixes, deliberately wrong ones elsewhere.
        let candidates = [xs[xs.len() - 1], xs[xs.len() - 1] + 1.0, 0.25];
        for cand in candidates {
            let r = diagnose_e_convergence(*sp, xs, &cand, *tol, 100).unwrap();
            assert!(r.agree, "prefix {idx} candidate {cand}: verdicts disagree");
        }
        let sc = diagnose_semi_cauchy(*sp, xs, *tol, 100).unwrap();
        if c.verdict {
            assert!(sc.verdict, "prefix {idx}: Cauchy but not semi-Cauchy");
        }
    }

    // The documented non-uniqueness witness: x_n = 1 + 1/n d-converges
    // to both 1 and 2 under max, but e-converges only to 1.
    let xs: Vec<f64> = (1..=2000).map(|n| 1.0 + 1.0 / n as f64).collect();
    let d1 = pmetric_core::dynamics::diagnose_d_convergence(&max, &xs, &1.0, 2e-3, 100).unwrap();
    let d2 = pmetric_core::dynamics::diagnose_d_convergence(&max, &xs, &2.0, 1e-9, 100).unwrap();
    assert!(d1 && d2, "d-limit should not be unique");
    let e1 = diagnose_e_convergence(&max, &xs, &1.0, 3e-3, 100).unwrap();
    let e2 = diagnose_e_convergence(&max, &xs, &2.0, 3e-3, 100).unwrap();
    assert!(e1.direct && !e2.direct && e1.agree && e2.agree);

    println!(
        "criterion 2 (convergence cross-checks, {} prefixes + witness): PASS",
        corpus.len()
    );
}

/// Independent brute-force rank scan: for each j, the minimal n (then
/// minimal m) with j <= m <= n and x_n - x_m >= level; stops at the
/// first j with no pair.
fn brute_force_ranks(xs: &[f64], level: f64, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    'outer: for j in k..xs.len() {
        for n in j..xs.len() {
            for m in j..=n {
                if (xs[n] - xs[m]).abs() >= level {
                    out.push((m, n));
                    continue 'outer;
                }
            }
        }
        break;
    }
    out
}

#[test]
fn criterion_3_violation_rank_suite() {
    let ln = line();
    let xs = harmonic(2000);
    for eps in [0.1f64, 0.5] {
        let verdict =
            pmetric_core::dynamics::extract_violation_ranks(&ln, &xs, 0.0, eps, 1, TOL).unwrap();
        let ext = match verdict {
            RankVerdict::Found(e) => e,
            RankVerdict::NoViolationFound => panic!("harmonic must violate at eps {eps}"),
        };
        let oracle = brute_force_ranks(&xs, eps, 1);
        assert_eq!(ext.pairs, oracle, "ranks differ from brute force at eps {eps}");
        assert!(ext.j_eps.is_some(), "no j(eps) found");
        assert!(ext.strict_bound_holds, "strict bound fails past j(eps)");
        // Trailing-quartile distances lie in [gamma+eps, gamma+eps+0.05].
        let q = ext.pairs.len() - ext.pairs.len().div_ceil(4);
        for &d in &ext.extracted_distances[q..] {
            assert!(d >= eps && d <= eps + 0.05, "distance {d} outside band at eps {eps}");
        }
    }
    println!("criterion 3 (violation-rank suite vs brute force, eps 0.1 and 0.5): PASS");
}

#[test]
fn criterion_4_identity_suite() {
    let tol = 1e-12;
    let mut spaces = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 7) as usize; // sizes 2..=8
        let s = random_space(n, 40_000 + i);
        // Constant map to the self-distance argmin: always
        // (M;b;phi)-contractive, and the check proves it each time.
        let argmin = (0..n)
            .min_by(|&a, &b| s.d(&a, &a).partial_cmp(&s.d(&b, &b)).unwrap())
            .unwrap();
        let map = FiniteMap::constant(argmin, &s).unwrap();
        let report =
            verify_contractive_finite(&s, &map, &Gauge::Linear(0.5), GKind::B, tol).unwrap();
        assert!(report.pass, "constant map not contractive on space {i}");

        for x in 0..n {
            // M(x,x) = d(x, Tx).
            let m = m_quantities(&s, &map, &x, &x);
            assert!((m.m3 - s.d(&x, &map.apply(&x))).abs() <= tol);
            // M(x,Tx) = max(d(x,Tx), d(Tx,T^2 x)).
            let tx = map.apply(&x);
            let ttx = map.apply(&tx);
            let m = m_quantities(&s, &map, &x, &tx);
            let want = s.d(&x, &tx).max(s.d(&tx, &ttx));
            assert!((m.m3 - want).abs() <= tol);
        }

        let fs = enumerate_fixed_structure(&s, &map, tol);
        let probes: Vec<usize> = (0..n).collect();
        for &z in &fs.fix_d {
            for &w in &fs.fix_d {
                let ids =
                    pmetric_core::contraction::fixed_point_identities(&s, &map, &z, &w, &probes, tol);
                assert!(ids.z_is_d_fixed && ids.w_is_d_fixed);
                assert!(ids.all_pass(), "identities fail at space {i}, pair ({z}, {w})");
            }
        }
        spaces += 1;
    }
    assert_eq!(spaces, 200);
    println!("criterion 4 (fixed-point identity suite, 200 spaces at 1e-12): PASS");
}

#[test]
fn criterion_5_picard_certified_run() {
    let space = ContinuousSpace::MaxOnRPlus;
    let map = ScalarMap::Halving;
    let gauge = Gauge::Linear(0.5);
    // Machine-check the hypotheses before certifying the run.
    let sampled = verify_contractive_sampled(
        &space,
        &map,
        &gauge,
        GKind::C,
        TOL,
        &RegionSampler::default(),
    )
    .unwrap();
    assert!(sampled.pass);
    let classes = classify(&gauge, &ClassifyConfig::default()).unwrap();
    assert!(classes.normal.pass && classes.right_limit_normal.pass);
    let hyp = HypothesisRecord {
        completeness: HypothesisStatus::Assumed,
        contractive: HypothesisStatus::VerifiedSampled,
        gauge_right_limit_normal: HypothesisStatus::Verified,
        gauge_limit_normal: HypothesisStatus::NotChecked,
        psi_semi_coercive: HypothesisStatus::NotChecked,
    };
    let run = solve_theorem1(&space, &map, 1.0, &IterationBudget::default(), 1e-10, hyp).unwrap();
    assert!(run.conclusions.rho_descending);
    assert!(run.conclusions.alpha_settles);
    assert!(run.conclusions.delta_settles);
    assert!(run.certificate.point.abs() <= 1e-10, "x* should be 0");
    assert!(run.certificate.d_to_image <= 1e-10);
    assert!(run.certificate.e_residual <= 1e-10);
    let iters = run.trace.points.len() - 1;
    assert!(iters <= 50, "{iters} iterations");
    println!("criterion 5 (certified Picard run, {iters} iterations, residual {:.2e}): PASS",
        run.certificate.e_residual);
}

#[test]
fn criterion_6_thousand_trial_campaign() {
    use pmetric_core::search::{run_campaign, GaugeSampler, MapSampler, TrialSpec};
    let base = TrialSpec {
        seed: 20_260_823,
        n: 6,
        w_max: 2.0,
        map_sampler: MapSampler::ContractionBiased { pull: 0.8 },
        gauge: GaugeSampler::Linear {
            alpha_min: 0.0,
            alpha_max: 0.9,
        },
        g: GKind::B,
        ablation: None,
    };
    let report = run_campaign(&base, 1000, TOL).unwrap();
    assert_eq!(report.trials, 1000);
    assert!(report.clean(), "violations: {:?}", report.violations);
    // The campaign must be non-vacuous: a healthy fraction of trials
    // passes the machine-checked hypotheses.
    assert!(
        report.hypothesis_passes >= 150,
        "only {} hypothesis passes",
        report.hypothesis_passes
    );
    println!(
        "criterion 6 (1000-trial campaign, {} hypothesis passes, 0 violations): PASS",
        report.hypothesis_passes
    );
}

#[test]
fn criterion_7_gauge_classification() {
    let cfg = ClassifyConfig::default();
    for g in [Gauge::Linear(0.5), Gauge::Rational] {
        let r = classify(&g, &cfg).unwrap();
        assert!(r.normal.pass, "{g:?}");
        assert!(r.right_limit_normal.pass, "{g:?}");
        assert!(r.limit_normal.pass, "{g:?}");
        assert!(r.psi_semi_coercive.pass, "{g:?}");
    }
    let r = classify(&Gauge::ExpSaturating, &cfg).unwrap();
    assert!(r.normal.pass && r.right_limit_normal.pass && r.limit_normal.pass);
    assert!(!r.psi_semi_coercive.pass);
    // Psi estimate at the far tail grid (alpha up to 100) collapses.
    assert!(r.psi_estimate.value < 1e-6, "Psi estimate {}", r.psi_estimate.value);

    // Closed-form oracle for the linear family: limsup at s is alpha*s.
    for alpha in [0.3, 0.5, 0.9] {
        let g = Gauge::Linear(alpha);
        for &s in &cfg.s_grid() {
            let est = limsup_right(&g, s, &cfg.limsup).unwrap().value;
            assert!(
                (est - alpha * s).abs() <= 1e-6,
                "alpha {alpha}, s {s}: estimate {est}"
            );
        }
    }
    println!("criterion 7 (gauge classification + linear closed-form oracle): PASS");
}

#[test]
fn criterion_8_banach_degeneration() {
    use rand::{Rng, SeedableRng};
    let mut hits = 0;
    for i in 0..100u64 {
        let n = 3 + (i % 4) as usize;
        // Zero-weight generation gives an ordinary (zero-diagonal) metric.
        let s = generate_random_space(
            n,
            90_000 + i,
            &RandomSpaceParams {
                w_max: 0.0,
                scale: 10.0,
            },
        )
        .unwrap();
        // Rejection-sample a map with Lipschitz ratio <= 0.9; fall
        // back to a constant map (ratio 0).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77_000 + i);
        let mut chosen: Option<Vec<usize>> = None;
        'attempts: for _ in 0..60 {
            let cand: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            for x in 0..n {
                for y in (x + 1)..n {
                    if s.d(&cand[x], &cand[y]) > 0.9 * s.d(&x, &y) {
                        continue 'attempts;
                    }
                }
            }
            chosen = Some(cand);
            break;
        }
        let table = chosen.unwrap_or_else(|| vec![0; n]);
        let map = FiniteMap::new(table.clone(), &s).unwrap();

        let (cert, _) =
            solve_theorem2_finite(&s, &map, &Gauge::Linear(0.9), &ClassifyConfig::fast(), TOL)
                .unwrap_or_else(|e| panic!("space {i}: {e}"));
        // Oracle: direct exhaustive enumeration of Tz = z.
        let oracle: Vec<usize> = (0..n).filter(|&z| table[z] == z).collect();
        assert_eq!(oracle.len(), 1, "space {i}: oracle found {oracle:?}");
        assert_eq!(cert.point, oracle[0], "space {i}");
        hits += 1;
    }
    assert_eq!(hits, 100);
    println!("criterion 8 (Banach degeneration vs enumeration oracle, 100/100): PASS");
}

// ---------------------------------------------------------------- golden corpus

struct GoldenCase {
    name: &'static str,
    args: &'static [&'static str],
    exit: i32,
}

const GOLDEN_CASES: &[GoldenCase] = &[
    GoldenCase { name: "verify_space3", args: &["verify", "space3.json", "--json"], exit: 0 },
    GoldenCase { name: "verify_broken", args: &["verify", "broken.json", "--json"], exit: 1 },
    GoldenCase { name: "derive_e", args: &["derive", "space3.json", "--what", "e", "--json"], exit: 0 },
    GoldenCase { name: "derive_b", args: &["derive", "space3.json", "--what", "b", "--json"], exit: 0 },
    GoldenCase {
        name: "contract_const",
        args: &["contract", "space3.json", "const0.json", "--gauge", "linear:0.5", "--g", "c", "--json"],
        exit: 0,
    },
    GoldenCase {
        name: "contract_swap",
        args: &["contract", "metric2.json", "swap.json", "--gauge", "linear:0.5", "--g", "c", "--json"],
        exit: 1,
    },
    GoldenCase {
        name: "solve_t1",
        args: &["solve", "max.json", "halving.json", "--gauge", "linear:0.5", "--x0", "1", "--json"],
        exit: 0,
    },
    GoldenCase {
        name: "solve_t2",
        args: &["solve", "max.json", "halving.json", "--gauge", "linear:0.5", "--x0", "1", "--theorem", "2", "--json"],
        exit: 0,
    },
    GoldenCase {
        name: "fixed_points",
        args: &["fixed-points", "space3.json", "const0.json", "--json"],
        exit: 0,
    },
    GoldenCase { name: "gauge_rational", args: &["gauge", "--gauge", "rational", "--json"], exit: 0 },
    GoldenCase {
        name: "analyze_econv",
        args: &["analyze", "seq.csv", "--space", "max.json", "--mode", "econv", "--x", "1",
                "--tol", "0.02", "--window", "50", "--json"],
        exit: 0,
    },
    GoldenCase { name: "search_campaign", args: &["search", "--config", "campaign.json", "--json"], exit: 0 },
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_case(case: &GoldenCase) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .args(case.args)
        .current_dir(golden_dir())
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_9_cli_golden_corpus() {
    assert_eq!(GOLDEN_CASES.len(), 12);
    for case in GOLDEN_CASES {
        let (stdout, code) = run_case(case);
        assert_eq!(code, case.exit, "{}: exit code", case.name);
        let expected_path = golden_dir().join("expected").join(format!("{}.json", case.name));
        let expected = std::fs::read(&expected_path)
            .unwrap_or_else(|_| panic!("{}: missing golden file", case.name));
        assert_eq!(
            stdout, expected,
            "{}: stdout differs from {}",
            case.name,
            expected_path.display()
        );
    }
    // Exit-2 surface: malformed input yields a single-line error.
    let out = Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .args(["verify", "no-such-file.json"])
        .current_dir(golden_dir())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "stderr: {err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    println!("criterion 9 (CLI golden corpus, 12 byte-identical reports): PASS");
}
