//! `pmetric` — partial-metric fixed-point toolbox.
//!
//! Single binary with subcommands sharing the space/map loaders and a
//! uniform error surface: exit 0 on success, 1 when a verification or
//! solve reports a violation, 2 on malformed input (with a single-line
//! `error:` message on stderr). Every report has a human rendering and
//! a `--json` rendering.

mod expr;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use formats::{MapSpec, Sequence, Space};
use pmetric_core::contraction::{
    verify_contractive_finite, verify_contractive_sampled, ContractionReport, FiniteMap, GKind,
    RegionSampler, ScalarMap,
};
use pmetric_core::dynamics::{
    self, diagnose_d_convergence, diagnose_e_cauchy, diagnose_e_convergence,
    diagnose_semi_cauchy, enumerate_fixed_structure, extract_violation_ranks, Certificate,
    ConclusionChecks, DynamicsError, HypothesisRecord, HypothesisStatus, IterationBudget,
    OrbitTrace, RankVerdict,
};
use pmetric_core::gauge::{classify, ClassifyConfig, Gauge};
use pmetric_core::search::{run_campaign, SearchReport};
use pmetric_core::space::{ContinuousSpace, DerivedMap, FiniteSpace};

#[derive(Parser)]
#[command(name = "pmetric", version, about = "Partial-metric fixed-point toolbox")]
struct Cli {
    /// Emit the report as JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DerivedWhat {
    B,
    C,
    E,
}

#[derive(Clone, Copy, ValueEnum)]
enum GArg {
    B,
    C,
}

impl From<GArg> for GKind {
    fn from(g: GArg) -> GKind {
        match g {
            GArg::B => GKind::B,
            GArg::C => GKind::C,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeMode {
    Dconv,
    Econv,
    Ecauchy,
    Semicauchy,
    Ranks,
}

#[derive(clap::Args, Clone, Copy)]
struct SamplerArgs {
    /// Region lower bound for continuous-space sampling.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    /// Region upper bound for continuous-space sampling.
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    /// Deterministic grid points per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Additional seeded random pairs.
    #[arg(long, default_value_t = 10000)]
    pairs: usize,
    /// Seed for the random pairs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<SamplerArgs> for RegionSampler {
    fn from(a: SamplerArgs) -> RegionSampler {
        RegionSampler {
            lo: a.lo,
            hi: a.hi,
            grid_points: a.grid,
            random_pairs: a.pairs,
            seed: a.seed,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the partial-metric axioms and the induced-metric law.
    Verify {
        space: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print a derived table: b (mean self-distances), c (max
    /// self-distances) or e (induced metric).
    Derive {
        space: PathBuf,
        #[arg(long, value_enum)]
        what: DerivedWhat,
    },
    /// Verify the contractive condition d(Tx,Ty) <= max(phi(M), g).
    Contract {
        space: PathBuf,
        map: PathBuf,
        #[arg(long)]
        gauge: String,
        #[arg(long, value_enum, default_value = "c")]
        g: GArg,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Run and certify Picard iteration to a (d-)fixed point.
    Solve {
        space: PathBuf,
        map: PathBuf,
        #[arg(long)]
        gauge: String,
        /// Start point: a label (finite spaces) or a real.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 1)]
        theorem: u8,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
        /// e-residual at which the orbit is considered converged.
        #[arg(long, default_value_t = 1e-12)]
        stop_tol: f64,
        /// Write the orbit trace as CSV (columns n, x_n, rho_n, alpha_n).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Enumerate Fix(T;d), theta, X(T;d) and Fix(T) on a finite space.
    FixedPoints {
        space: PathBuf,
        map: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Classify a gauge: normal, right-limit-normal, limit-normal,
    /// semi-coercive residual.
    Gauge {
        #[arg(long)]
        gauge: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run sequence diagnostics on a CSV prefix.
    Analyze {
        seq: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum)]
        mode: AnalyzeMode,
        /// Convergence candidate (label or real); dconv/econv only.
        #[arg(long)]
        x: Option<String>,
        /// Violation level offset above gamma; ranks mode only.
        #[arg(long)]
        eps: Option<f64>,
        /// First rank index for the extraction; ranks mode only.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        window: usize,
    },
    /// Run a seeded randomized theorem-validation campaign.
    Search {
        #[arg(long)]
        config: PathBuf,
        /// Directory for standalone replayable violation configs.
        #[arg(long)]
        violations_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            // Single-line machine-parseable error surface.
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Six-significant-digit rendering for human output.
fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-3..1e7).contains(&a) {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.5e}")
    }
}

fn emit<T: Serialize>(json: bool, report: &T, human: String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        println!("{human}");
    }
    Ok(())
}

fn pass_str(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Verify { space, tol } => cmd_verify(cli.json, &space, tol),
        Cmd::Derive { space, what } => cmd_derive(cli.json, &space, what),
        Cmd::Contract {
            space,
            map,
            gauge,
            g,
            tol,
            sampler,
        } => cmd_contract(cli.json, &space, &map, &gauge, g.into(), tol, sampler),
        Cmd::Solve {
            space,
            map,
            gauge,
            x0,
            theorem,
            tol,
            max_iter,
            stop_tol,
            trace,
            sampler,
        } => cmd_solve(
            cli.json, &space, &map, &gauge, &x0, theorem, tol, max_iter, stop_tol,
            trace.as_deref(), sampler,
        ),
        Cmd::FixedPoints { space, map, tol } => cmd_fixed_points(cli.json, &space, &map, tol),
        Cmd::Gauge { gauge, tol } => cmd_gauge(cli.json, &gauge, tol),
        Cmd::Analyze {
            seq,
            space,
            mode,
            x,
            eps,
            k,
            tol,
            window,
        } => cmd_analyze(cli.json, &seq, &space, mode, x.as_deref(), eps, k, tol, window),
        Cmd::Search {
            config,
            violations_dir,
        } => cmd_search(cli.json, &config, violations_dir.as_deref()),
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyOut {
    command: &'static str,
    n: usize,
    symmetry: CheckOut,
    reflexive_triangle: CheckOut,
    matthews: CheckOut,
    weak_sufficiency: CheckOut,
    induced_metric: InducedOut,
    valid: bool,
}

#[derive(Serialize)]
struct CheckOut {
    pass: bool,
    margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<[usize; 3]>,
}

#[derive(Serialize)]
struct InducedOut {
    symmetry: bool,
    identity: bool,
    triangle: bool,
    self_distance_bound: bool,
    pass: bool,
}

fn cmd_verify(json: bool, path: &std::path::Path, tol: f64) -> Result<u8> {
    let space = match formats::load_space(path)? {
        Space::Finite(s) => s,
        Space::Continuous(_) => {
            // Builtin continuous families satisfy the axioms by
            // construction; nothing to sample.
            if json {
                println!("{}", serde_json::json!({
                    "command": "verify",
                    "family": true,
                    "valid": true,
                    "note": "builtin continuous family; axioms hold by construction"
                }));
            } else {
                println!("builtin continuous family: axioms hold by construction");
            }
            return Ok(0);
        }
    };
    let ax = space.check_axioms(tol);
    let conv = |c: &pmetric_core::space::AxiomCheck| CheckOut {
        pass: c.pass,
        margin: c.margin,
        witness: c.witness,
    };
    let induced = match space.check_e_metric(tol) {
        Ok(r) => InducedOut {
            symmetry: r.symmetry.pass,
            identity: r.identity.pass,
            triangle: r.triangle.pass,
            self_distance_bound: r.self_distance_bound.pass,
            pass: r.all_pass(),
        },
        Err(_) => InducedOut {
            symmetry: false,
            identity: false,
            triangle: false,
            self_distance_bound: false,
            pass: false,
        },
    };
    let out = VerifyOut {
        command: "verify",
        n: space.len(),
        symmetry: conv(&ax.symmetry),
        reflexive_triangle: conv(&ax.reflexive_triangular),
        matthews: conv(&ax.matthews),
        weak_sufficiency: conv(&ax.weak_sufficiency),
        valid: ax.all_pass() && induced.pass,
        induced_metric: induced,
    };
    let human = format!(
        "symmetry            {} (margin {})\n\
         reflexive triangle  {} (margin {})\n\
         matthews            {} (margin {})\n\
         weak sufficiency    {} (margin {})\n\
         induced metric e    {}",
        pass_str(out.symmetry.pass),
        sig6(out.symmetry.margin),
        pass_str(out.reflexive_triangle.pass),
        sig6(out.reflexive_triangle.margin),
        pass_str(out.matthews.pass),
        sig6(out.matthews.margin),
        pass_str(out.weak_sufficiency.pass),
        sig6(out.weak_sufficiency.margin),
        pass_str(out.induced_metric.pass),
    );
    let code = if out.valid { 0 } else { 1 };
    emit(json, &out, human)?;
    Ok(code)
}

// ---------------------------------------------------------------- derive

#[derive(Serialize)]
struct DeriveOut {
    command: &'static str,
    what: &'static str,
    labels: Vec<String>,
    table: Vec<Vec<f64>>,
}

fn cmd_derive(json: bool, path: &std::path::Path, what: DerivedWhat) -> Result<u8> {
    let space = match formats::load_space(path)? {
        Space::Finite(s) => s,
        Space::Continuous(_) => bail!("derive needs a finite space table"),
    };
    let (which, name) = match what {
        DerivedWhat::B => (DerivedMap::B, "b"),
        DerivedWhat::C => (DerivedMap::C, "c"),
        DerivedWhat::E => (DerivedMap::E, "e"),
    };
    let table = space.derived_table(which);
    let human = table
        .iter()
        .map(|row| row.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join("\t"))
        .collect::<Vec<_>>()
        .join("\n");
    let out = DeriveOut {
        command: "derive",
        what: name,
        labels: space.labels().to_vec(),
        table,
    };
    emit(json, &out, human)?;
    Ok(0)
}

// ---------------------------------------------------------------- contract

#[derive(Serialize)]
struct ContractOut {
    command: &'static str,
    gauge: String,
    g: &'static str,
    pass: bool,
    worst_margin: f64,
    pairs_checked: usize,
    exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<(String, String)>,
}

fn contract_out<P: std::fmt::Display>(
    report: &ContractionReport<P>,
    gauge: &Gauge,
    g: GKind,
    label: impl Fn(&P) -> String,
) -> ContractOut {
    ContractOut {
        command: "contract",
        gauge: gauge.name(),
        g: match g {
            GKind::B => "b",
            GKind::C => "c",
        },
        pass: report.pass,
        worst_margin: report.worst_margin,
        pairs_checked: report.pairs_checked,
        exhaustive: report.exhaustive,
        witness: report.witness.as_ref().map(|(x, y)| (label(x), label(y))),
    }
}

fn cmd_contract(
    json: bool,
    space_path: &std::path::Path,
    map_path: &std::path::Path,
    gauge_spec: &str,
    g: GKind,
    tol: f64,
    sampler: SamplerArgs,
) -> Result<u8> {
    let gauge = formats::parse_gauge(gauge_spec)?;
    let out = match (formats::load_space(space_path)?, formats::load_map(map_path)?) {
        (Space::Finite(space), MapSpec::Table(table)) => {
            let map = FiniteMap::new(table, &space)?;
            let report = verify_contractive_finite(&space, &map, &gauge, g, tol)?;
            contract_out(&report, &gauge, g, |i| space.labels()[*i].clone())
        }
        (Space::Continuous(space), MapSpec::Scalar(map)) => {
            let report =
                verify_contractive_sampled(&space, &map, &gauge, g, tol, &sampler.into())?;
            contract_out(&report, &gauge, g, |x| sig6(*x))
        }
        _ => bail!("space kind and map kind do not match (table maps act on finite spaces, scalar maps on continuous ones)"),
    };
    let human = match &out.witness {
        Some((x, y)) if !out.pass => format!(
            "contractive ({}; g = {}): FAIL, worst margin {} at pair ({x}, {y}) over {} pairs",
            out.gauge, out.g, sig6(out.worst_margin), out.pairs_checked
        ),
        _ => format!(
            "contractive ({}; g = {}): {} (worst margin {}, {} pairs{})",
            out.gauge,
            out.g,
            pass_str(out.pass),
            sig6(out.worst_margin),
            out.pairs_checked,
            if out.exhaustive { ", exhaustive" } else { ", sampled" }
        ),
    };
    let code = if out.pass { 0 } else { 1 };
    emit(json, &out, human)?;
    Ok(code)
}

// ---------------------------------------------------------------- solve

#[derive(Serialize)]
struct SolveOut {
    command: &'static str,
    theorem: u8,
    certificate: CertificateOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    conclusions: Option<ConclusionChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_path: Option<String>,
}

#[derive(Serialize)]
struct CertificateOut {
    kind: dynamics::CertificateKind,
    point: String,
    d_self: f64,
    d_to_image: f64,
    e_residual: f64,
    gamma: f64,
    hypotheses: HypothesisRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_td: Option<Vec<String>>,
}

fn certificate_out<P>(cert: &Certificate<P>, label: impl Fn(&P) -> String) -> CertificateOut {
    CertificateOut {
        kind: cert.kind,
        point: label(&cert.point),
        d_self: cert.d_self,
        d_to_image: cert.d_to_image,
        e_residual: cert.e_residual,
        gamma: cert.gamma,
        hypotheses: cert.hypotheses,
        theta: cert.theta,
        x_td: cert
            .x_td
            .as_ref()
            .map(|v| v.iter().map(&label).collect()),
    }
}

fn write_trace<P>(
    path: &std::path::Path,
    trace: &OrbitTrace<P>,
    label: impl Fn(&P) -> String,
) -> Result<()> {
    let mut out = String::from("n,x_n,rho_n,alpha_n\n");
    for (n, x) in trace.points.iter().enumerate() {
        let rho = trace
            .rho
            .get(n)
            .map(|r| format!("{r}"))
            .unwrap_or_default();
        out.push_str(&format!("{n},{},{rho},{}\n", label(x), trace.alpha[n]));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Map solver failures onto the exit-1 surface with a printed reason.
fn solve_failure(json: bool, e: DynamicsError) -> Result<u8> {
    let reason = e.to_string();
    if json {
        println!(
            "{}",
            serde_json::json!({"command": "solve", "failed": true, "reason": reason})
        );
    } else {
        println!("solve failed: {reason}");
    }
    Ok(1)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    json: bool,
    space_path: &std::path::Path,
    map_path: &std::path::Path,
    gauge_spec: &str,
    x0: &str,
    theorem: u8,
    tol: f64,
    max_iter: usize,
    stop_tol: f64,
    trace_path: Option<&std::path::Path>,
    sampler: SamplerArgs,
) -> Result<u8> {
    if !(theorem == 1 || theorem == 2) {
        bail!("--theorem must be 1 or 2");
    }
    let gauge = formats::parse_gauge(gauge_spec)?;
    let budget = IterationBudget { max_iter, stop_tol };
    let cfg = ClassifyConfig::default();

    match (formats::load_space(space_path)?, formats::load_map(map_path)?) {
        (Space::Finite(space), MapSpec::Table(table)) => {
            let map = FiniteMap::new(table, &space)?;
            let x0 = space
                .index_of(x0)
                .map_err(|_| anyhow!("start point '{x0}' is not a label of the space"))?;
            if theorem == 2 {
                match dynamics::solve_theorem2_finite(&space, &map, &gauge, &cfg, tol) {
                    Ok((cert, _)) => {
                        let out = SolveOut {
                            command: "solve",
                            theorem,
                            certificate: certificate_out(&cert, |i| {
                                space.labels()[*i].clone()
                            }),
                            conclusions: None,
                            iterations: None,
                            trace_path: None,
                        };
                        emit(json, &out, human_solve(&out))?;
                        Ok(0)
                    }
                    Err(e) => solve_failure(json, e),
                }
            } else {
                let hyp = theorem1_hypotheses_finite(&space, &map, &gauge, &cfg, tol)?;
                if let Err(name) = hyp {
                    return solve_failure(json, DynamicsError::HypothesisFailed { name });
                }
                match dynamics::solve_theorem1(&space, &map, x0, &budget, tol, hyp.unwrap()) {
                    Ok(run) => {
                        if let Some(p) = trace_path {
                            write_trace(p, &run.trace, |i| space.labels()[*i].clone())?;
                        }
                        let out = SolveOut {
                            command: "solve",
                            theorem,
                            certificate: certificate_out(&run.certificate, |i| {
                                space.labels()[*i].clone()
                            }),
                            conclusions: Some(run.conclusions),
                            iterations: Some(run.trace.points.len() - 1),
                            trace_path: trace_path.map(|p| p.display().to_string()),
                        };
                        emit(json, &out, human_solve(&out))?;
                        Ok(0)
                    }
                    Err(e) => solve_failure(json, e),
                }
            }
        }
        (Space::Continuous(space), MapSpec::Scalar(map)) => {
            let x0: f64 = x0
                .parse()
                .with_context(|| format!("start point '{x0}' is not a real"))?;
            let region: RegionSampler = sampler.into();
            if theorem == 2 {
                match dynamics::solve_theorem2_continuous(
                    &space, &map, &gauge, &region, &budget, &cfg, tol, 8,
                ) {
                    Ok(cert) => {
                        let out = SolveOut {
                            command: "solve",
                            theorem,
                            certificate: certificate_out(&cert, |x| sig6(*x)),
                            conclusions: None,
                            iterations: None,
                            trace_path: None,
                        };
                        emit(json, &out, human_solve(&out))?;
                        Ok(0)
                    }
                    Err(e) => solve_failure(json, e),
                }
            } else {
                let hyp =
                    theorem1_hypotheses_continuous(&space, &map, &gauge, &region, &cfg, tol)?;
                if let Err(name) = hyp {
                    return solve_failure(json, DynamicsError::HypothesisFailed { name });
                }
                match dynamics::solve_theorem1(&space, &map, x0, &budget, tol, hyp.unwrap()) {
                    Ok(run) => {
                        if let Some(p) = trace_path {
                            write_trace(p, &run.trace, |x| format!("{x}"))?;
                        }
                        let out = SolveOut {
                            command: "solve",
                            theorem,
                            certificate: certificate_out(&run.certificate, |x| sig6(*x)),
                            conclusions: Some(run.conclusions),
                            iterations: Some(run.trace.points.len() - 1),
                            trace_path: trace_path.map(|p| p.display().to_string()),
                        };
                        emit(json, &out, human_solve(&out))?;
                        Ok(0)
                    }
                    Err(e) => solve_failure(json, e),
                }
            }
        }
        _ => bail!("space kind and map kind do not match"),
    }
}

/// Machine-check Theorem-1 hypotheses on a finite space: axioms,
/// contractivity with g = c, right-limit-normal gauge.
fn theorem1_hypotheses_finite(
    space: &FiniteSpace,
    map: &FiniteMap,
    gauge: &Gauge,
    cfg: &ClassifyConfig,
    tol: f64,
) -> Result<std::result::Result<HypothesisRecord, String>> {
    if !space.is_valid(tol) {
        return Ok(Err("space axioms".to_string()));
    }
    let contraction = verify_contractive_finite(space, map, gauge, GKind::C, tol)?;
    if !contraction.pass {
        return Ok(Err("(M;c;phi)-contractive".to_string()));
    }
    let classes = classify(gauge, cfg)?;
    if !classes.normal.pass || !classes.right_limit_normal.pass {
        return Ok(Err("right-limit-normal".to_string()));
    }
    Ok(Ok(HypothesisRecord {
        completeness: HypothesisStatus::Verified, // finite spaces are complete
        contractive: HypothesisStatus::Verified,
        gauge_right_limit_normal: HypothesisStatus::Verified,
        gauge_limit_normal: HypothesisStatus::NotChecked,
        psi_semi_coercive: HypothesisStatus::NotChecked,
    }))
}

fn theorem1_hypotheses_continuous(
    space: &ContinuousSpace,
    map: &ScalarMap,
    gauge: &Gauge,
    region: &RegionSampler,
    cfg: &ClassifyConfig,
    tol: f64,
) -> Result<std::result::Result<HypothesisRecord, String>> {
    let contraction = verify_contractive_sampled(space, map, gauge, GKind::C, tol, region)?;
    if !contraction.pass {
        return Ok(Err("(M;c;phi)-contractive (sampled)".to_string()));
    }
    let classes = classify(gauge, cfg)?;
    if !classes.normal.pass || !classes.right_limit_normal.pass {
        return Ok(Err("right-limit-normal".to_string()));
    }
    Ok(Ok(HypothesisRecord {
        completeness: HypothesisStatus::Assumed,
        contractive: HypothesisStatus::VerifiedSampled,
        gauge_right_limit_normal: HypothesisStatus::Verified,
        gauge_limit_normal: HypothesisStatus::NotChecked,
        psi_semi_coercive: HypothesisStatus::NotChecked,
    }))
}

fn human_solve(out: &SolveOut) -> String {
    let c = &out.certificate;
    let mut s = format!(
        "certificate: {:?}\npoint        {}\nd(x*,x*)     {}\nd(x*,Tx*)    {}\ne(x*,Tx*)    {}",
        c.kind,
        c.point,
        sig6(c.d_self),
        sig6(c.d_to_image),
        sig6(c.e_residual),
    );
    if let Some(theta) = c.theta {
        s.push_str(&format!("\ntheta        {}", sig6(theta)));
    }
    if let Some(x_td) = &c.x_td {
        s.push_str(&format!("\nX(T;d)       {{{}}}", x_td.join(", ")));
    }
    if let Some(iters) = out.iterations {
        s.push_str(&format!("\niterations   {iters}"));
    }
    if let Some(conc) = &out.conclusions {
        s.push_str(&format!(
            "\nconclusions  rho descending {}, alpha settles {}, delta settles {}",
            pass_str(conc.rho_descending),
            pass_str(conc.alpha_settles),
            pass_str(conc.delta_settles),
        ));
    }
    if let Some(p) = &out.trace_path {
        s.push_str(&format!("\ntrace        {p}"));
    }
    s
}

// ---------------------------------------------------------------- fixed-points

#[derive(Serialize)]
struct FixedPointsOut {
    command: &'static str,
    fix_d: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    x_td: Vec<String>,
    fix: Vec<String>,
}

fn cmd_fixed_points(
    json: bool,
    space_path: &std::path::Path,
    map_path: &std::path::Path,
    tol: f64,
) -> Result<u8> {
    let space = match formats::load_space(space_path)? {
        Space::Finite(s) => s,
        Space::Continuous(_) => bail!("fixed-points needs a finite space"),
    };
    let table = match formats::load_map(map_path)? {
        MapSpec::Table(t) => t,
        MapSpec::Scalar(_) => bail!("fixed-points needs a table map"),
    };
    let map = FiniteMap::new(table, &space)?;
    let fs = enumerate_fixed_structure(&space, &map, tol);
    let lab = |ix: &usize| space.labels()[*ix].clone();
    let out = FixedPointsOut {
        command: "fixed-points",
        fix_d: fs.fix_d.iter().map(lab).collect(),
        theta: fs.theta,
        x_td: fs.x_td.iter().map(lab).collect(),
        fix: fs.fix.iter().map(lab).collect(),
    };
    let human = format!(
        "Fix(T;d)  {{{}}}\ntheta     {}\nX(T;d)    {{{}}}\nFix(T)    {{{}}}",
        out.fix_d.join(", "),
        out.theta.map(sig6).unwrap_or_else(|| "-".to_string()),
        out.x_td.join(", "),
        out.fix.join(", "),
    );
    emit(json, &out, human)?;
    Ok(0)
}

// ---------------------------------------------------------------- gauge

#[derive(Serialize)]
struct GaugeOut {
    command: &'static str,
    gauge: String,
    normal: bool,
    right_limit_normal: bool,
    limit_normal: bool,
    psi_semi_coercive: bool,
    psi_estimate: f64,
    sandwich_margin: f64,
}

fn cmd_gauge(json: bool, gauge_spec: &str, _tol: f64) -> Result<u8> {
    let gauge = formats::parse_gauge(gauge_spec)?;
    let report = classify(&gauge, &ClassifyConfig::default())?;
    let out = GaugeOut {
        command: "gauge",
        gauge: gauge.name(),
        normal: report.normal.pass,
        right_limit_normal: report.right_limit_normal.pass,
        limit_normal: report.limit_normal.pass,
        psi_semi_coercive: report.psi_semi_coercive.pass,
        psi_estimate: report.psi_estimate.value,
        sandwich_margin: report.sandwich_margin,
    };
    let human = format!(
        "normal              {}\nright-limit-normal  {}\nlimit-normal        {}\nsemi-coercive psi   {} (Psi estimate {})\nsandwich margin     {}",
        pass_str(out.normal),
        pass_str(out.right_limit_normal),
        pass_str(out.limit_normal),
        pass_str(out.psi_semi_coercive),
        sig6(out.psi_estimate),
        sig6(out.sandwich_margin),
    );
    emit(json, &out, human)?;
    Ok(0)
}

// ---------------------------------------------------------------- analyze

enum Points {
    Finite(FiniteSpace, Vec<usize>),
    Scalar(ContinuousSpace, Vec<f64>),
}

fn load_points(space_path: &std::path::Path, seq_path: &std::path::Path) -> Result<Points> {
    let seq = formats::load_sequence(seq_path)?;
    match formats::load_space(space_path)? {
        Space::Finite(s) => {
            let ixs: Vec<usize> = match seq {
                Sequence::Labels(ls) => ls
                    .iter()
                    .map(|l| {
                        s.index_of(l)
                            .map_err(|_| anyhow!("label '{l}' is not in the space"))
                    })
                    .collect::<Result<_>>()?,
                Sequence::Reals(vs) => vs
                    .iter()
                    .map(|v| {
                        let ix = *v as usize;
                        if ix as f64 == *v && ix < s.len() {
                            Ok(ix)
                        } else {
                            Err(anyhow!("value {v} is not a point index of the space"))
                        }
                    })
                    .collect::<Result<_>>()?,
            };
            Ok(Points::Finite(s, ixs))
        }
        Space::Continuous(s) => match seq {
            Sequence::Reals(vs) => Ok(Points::Scalar(s, vs)),
            Sequence::Labels(_) => bail!("continuous spaces need a numeric sequence"),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    json: bool,
    seq_path: &std::path::Path,
    space_path: &std::path::Path,
    mode: AnalyzeMode,
    x: Option<&str>,
    eps: Option<f64>,
    k: usize,
    tol: f64,
    window: usize,
) -> Result<u8> {
    let points = load_points(space_path, seq_path)?;
    macro_rules! dispatch {
        ($space:expr, $pts:expr, $cand:expr) => {{
            let (space, pts) = ($space, $pts);
            match mode {
                AnalyzeMode::Dconv => {
                    let cand = $cand?;
                    let verdict = diagnose_d_convergence(space, pts, &cand, tol, window)?;
                    analyze_emit(json, "dconv", serde_json::json!({"verdict": verdict}),
                        format!("d-convergence to candidate: {}", pass_str(verdict)), verdict)
                }
                AnalyzeMode::Econv => {
                    let cand = $cand?;
                    let r = diagnose_e_convergence(space, pts, &cand, tol, window)?;
                    analyze_emit(json, "econv", serde_json::to_value(&r)?,
                        format!(
                            "e-convergence to candidate: {} (dual characterization {}, agree {})",
                            pass_str(r.direct), pass_str(r.characterization), r.agree
                        ), r.direct)
                }
                AnalyzeMode::Ecauchy => {
                    let r = diagnose_e_cauchy(space, pts, tol, window)?;
                    analyze_emit(json, "ecauchy", serde_json::to_value(&r)?,
                        format!(
                            "e-Cauchy: {} (gamma {}, d-side {}, e-side {}, agree {})",
                            pass_str(r.verdict), sig6(r.gamma), pass_str(r.d_side),
                            pass_str(r.e_side), r.agree
                        ), r.verdict)
                }
                AnalyzeMode::Semicauchy => {
                    let r = diagnose_semi_cauchy(space, pts, tol, window)?;
                    analyze_emit(json, "semicauchy", serde_json::to_value(&r)?,
                        format!(
                            "e-semi-Cauchy: {} (gamma {}, alpha settles {}, rho settles {})",
                            pass_str(r.verdict), sig6(r.gamma),
                            pass_str(r.alpha_settles), pass_str(r.rho_settles)
                        ), r.verdict)
                }
                AnalyzeMode::Ranks => {
                    let eps = eps.ok_or_else(|| anyhow!("ranks mode needs --eps"))?;
                    let sc = diagnose_semi_cauchy(space, pts, tol, window)?;
                    let v = extract_violation_ranks(space, pts, sc.gamma, eps, k, tol)?;
                    let human = match &v {
                        RankVerdict::NoViolationFound =>
                            "no violation found: prefix is e-Cauchy-consistent at this eps"
                                .to_string(),
                        RankVerdict::Found(ext) => format!(
                            "violation ranks found: {} pairs from j = {}, j(eps) = {}, strict bound {}, trailing excess {}",
                            ext.pairs.len(), ext.k,
                            ext.j_eps.map(|j| j.to_string()).unwrap_or_else(|| "-".to_string()),
                            pass_str(ext.strict_bound_holds), sig6(ext.trailing_excess)
                        ),
                    };
                    // Finding a violation is a successful diagnosis.
                    analyze_emit(json, "ranks",
                        serde_json::json!({"gamma": sc.gamma, "result": serde_json::to_value(&v)?}),
                        human, true)
                }
            }
        }};
    }
    match &points {
        Points::Finite(s, pts) => {
            let cand = || -> Result<usize> {
                let l = x.ok_or_else(|| anyhow!("this mode needs --x <candidate>"))?;
                s.index_of(l)
                    .map_err(|_| anyhow!("candidate '{l}' is not in the space"))
            };
            dispatch!(s, pts, cand())
        }
        Points::Scalar(s, pts) => {
            let cand = || -> Result<f64> {
                let l = x.ok_or_else(|| anyhow!("this mode needs --x <candidate>"))?;
                l.parse().with_context(|| format!("candidate '{l}' is not a real"))
            };
            dispatch!(s, pts, cand())
        }
    }
}

fn analyze_emit(
    json: bool,
    mode: &str,
    value: serde_json::Value,
    human: String,
    ok: bool,
) -> Result<u8> {
    if json {
        let wrapped = serde_json::json!({"command": "analyze", "mode": mode, "report": value});
        println!("{}", serde_json::to_string_pretty(&wrapped)?);
    } else {
        println!("{human}");
    }
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------- search

#[derive(Serialize)]
struct SearchOut {
    command: &'static str,
    report: SearchReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    replay_files: Vec<String>,
}

fn cmd_search(
    json: bool,
    config_path: &std::path::Path,
    violations_dir: Option<&std::path::Path>,
) -> Result<u8> {
    let cfg = formats::load_campaign(config_path)?;
    let report = run_campaign(&cfg.base, cfg.count, cfg.tol)?;

    let mut replay_files = Vec::new();
    if let (Some(dir), false) = (violations_dir, report.violations.is_empty()) {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;
        for w in &report.violations {
            // A violation replays as a count-1 campaign.
            let mut v = serde_json::to_value(&w.spec)?;
            v.as_object_mut()
                .unwrap()
                .insert("count".to_string(), serde_json::json!(1));
            v.as_object_mut()
                .unwrap()
                .insert("tol".to_string(), serde_json::json!(cfg.tol));
            let path = dir.join(format!("violation-{}.json", w.spec.seed));
            std::fs::write(&path, serde_json::to_string_pretty(&v)?)
                .with_context(|| format!("cannot write {}", path.display()))?;
            replay_files.push(path.display().to_string());
        }
    }

    let clean = report.clean();
    let human = format!(
        "trials              {}\nhypothesis passes   {}\nviolations          {}\nablated failures    {}{}",
        report.trials,
        report.hypothesis_passes,
        report.violations.len(),
        report.ablated_hypothesis_failures,
        if replay_files.is_empty() {
            String::new()
        } else {
            format!("\nreplay files        {}", replay_files.join(", "))
        }
    );
    let out = SearchOut {
        command: "search",
        report,
        replay_files,
    };
    emit(json, &out, human)?;
    Ok(if clean { 0 } else { 1 })
}
