//! On-disk file formats: space files, map files, gauge spec strings,
//! campaign configs and sequence CSVs. All reals are plain JSON
//! decimals; NaN and infinities are rejected.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use pmetric_core::contraction::ScalarMap;
use pmetric_core::gauge::{Gauge, GaugeError};
use pmetric_core::search::TrialSpec;
use pmetric_core::space::{ContinuousSpace, FiniteSpace};
use serde::Deserialize;

use crate::expr::{self, Expr};

/// A loaded space: finite table or a builtin continuous family.
pub enum Space {
    Finite(FiniteSpace),
    Continuous(ContinuousSpace),
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum SpaceFile {
    Finite {
        #[serde(default)]
        labels: Option<Vec<String>>,
        d: Vec<Vec<f64>>,
    },
    Family {
        family: String,
        #[serde(default)]
        params: serde_json::Value,
    },
}

fn check_finite_reals(table: &[Vec<f64>]) -> Result<()> {
    for row in table {
        for v in row {
            if !v.is_finite() {
                bail!("non-finite real {v} in distance table");
            }
        }
    }
    Ok(())
}

pub fn load_space(path: &Path) -> Result<Space> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read space file {}", path.display()))?;
    let file: SpaceFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed space file {}", path.display()))?;
    match file {
        SpaceFile::Finite { labels, d } => {
            check_finite_reals(&d)?;
            let space = match labels {
                Some(l) => FiniteSpace::new(l, d)?,
                None => FiniteSpace::from_table(d)?,
            };
            Ok(Space::Finite(space))
        }
        SpaceFile::Family { family, params } => match family.as_str() {
            "max_on_rplus" => Ok(Space::Continuous(ContinuousSpace::MaxOnRPlus)),
            "weighted" => {
                #[derive(Deserialize)]
                struct P {
                    expr: String,
                }
                let p: P = serde_json::from_value(params)
                    .context("weighted family needs params: {\"expr\": \"<expr in x>\"}")?;
                let tree = expr::parse(&p.expr, "x").map_err(|e| anyhow!("{e}"))?;
                let weight = move |x: f64| tree.eval(x).unwrap_or(f64::NAN);
                Ok(Space::Continuous(ContinuousSpace::Weighted {
                    weight: Arc::new(weight),
                }))
            }
            "intervals" => bail!(
                "the intervals family has no CLI-addressable points; use the library API"
            ),
            other => bail!("unknown space family '{other}'"),
        },
    }
}

/// A loaded self-map, matching the kind of space it acts on.
pub enum MapSpec {
    Table(Vec<usize>),
    Scalar(ScalarMap),
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum MapFile {
    Table {
        table: Vec<usize>,
    },
    Family {
        family: String,
        #[serde(default)]
        params: serde_json::Value,
    },
    Expr {
        expr: String,
    },
}

pub fn load_map(path: &Path) -> Result<MapSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read map file {}", path.display()))?;
    let file: MapFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed map file {}", path.display()))?;
    match file {
        MapFile::Table { table } => Ok(MapSpec::Table(table)),
        MapFile::Family { family, params } => match family.as_str() {
            "halving" => Ok(MapSpec::Scalar(ScalarMap::Halving)),
            "affine" => {
                #[derive(Deserialize)]
                struct P {
                    a: f64,
                    b: f64,
                }
                let p: P = serde_json::from_value(params)
                    .context("affine family needs params: {\"a\": .., \"b\": ..}")?;
                if !p.a.is_finite() || !p.b.is_finite() {
                    bail!("affine parameters must be finite reals");
                }
                Ok(MapSpec::Scalar(ScalarMap::Affine { a: p.a, b: p.b }))
            }
            other => bail!("unknown map family '{other}'"),
        },
        MapFile::Expr { expr: src } => {
            let tree = expr::parse(&src, "x").map_err(|e| anyhow!("{e}"))?;
            Ok(MapSpec::Scalar(scalar_from_expr(src, tree)))
        }
    }
}

/// Wrap a parsed map expression; domain failures surface as NaN, which
/// every downstream distance validation rejects.
fn scalar_from_expr(name: String, tree: Expr) -> ScalarMap {
    ScalarMap::Custom {
        name,
        f: Arc::new(move |x: f64| tree.eval(x).unwrap_or(f64::NAN)),
    }
}

/// Parse a gauge spec string: `linear:<alpha>`, `rational`, `expsat`,
/// or `expr:<expression in t>`.
pub fn parse_gauge(spec: &str) -> Result<Gauge> {
    if let Some(alpha) = spec.strip_prefix("linear:") {
        let alpha: f64 = alpha
            .parse()
            .with_context(|| format!("bad linear gauge parameter '{alpha}'"))?;
        if !alpha.is_finite() || alpha < 0.0 {
            bail!("linear gauge parameter must be a finite nonnegative real");
        }
        return Ok(Gauge::Linear(alpha));
    }
    if let Some(src) = spec.strip_prefix("expr:") {
        let tree = expr::parse(src, "t").map_err(|e| anyhow!("{e}"))?;
        let name = src.to_string();
        let f = move |t: f64| {
            tree.eval(t).map_err(|e| GaugeError::ExpressionDomain {
                detail: e.detail.clone(),
            })
        };
        return Ok(Gauge::Custom {
            name,
            f: Arc::new(f),
        });
    }
    match spec {
        "rational" => Ok(Gauge::Rational),
        "expsat" => Ok(Gauge::ExpSaturating),
        other => bail!(
            "unknown gauge spec '{other}' (expected linear:<a>, rational, expsat or expr:<e>)"
        ),
    }
}

/// Campaign config: a [`TrialSpec`] plus trial count and tolerance.
#[derive(Deserialize)]
pub struct CampaignConfig {
    pub count: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(flatten)]
    pub base: TrialSpec,
}

fn default_tol() -> f64 {
    1e-9
}

pub fn load_campaign(path: &Path) -> Result<CampaignConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read campaign config {}", path.display()))?;
    let cfg: CampaignConfig = serde_json::from_str(&text)
        .with_context(|| format!("malformed campaign config {}", path.display()))?;
    if cfg.count == 0 {
        bail!("campaign count must be at least 1");
    }
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 {
        bail!("campaign tol must be a positive real");
    }
    Ok(cfg)
}

/// A sequence loaded for diagnostics: reals or labels, one per line.
pub enum Sequence {
    Reals(Vec<f64>),
    Labels(Vec<String>),
}

pub fn load_sequence(path: &Path) -> Result<Sequence> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read sequence file {}", path.display()))?;
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        bail!("sequence file {} is empty", path.display());
    }
    if lines.iter().all(|l| l.parse::<f64>().is_ok()) {
        let vals: Vec<f64> = lines.iter().map(|l| l.parse().unwrap()).collect();
        if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
            bail!("non-finite real {v} in sequence");
        }
        Ok(Sequence::Reals(vals))
    } else {
        Ok(Sequence::Labels(lines.iter().map(|l| l.to_string()).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn finite_space_round_trip() {
        let f = tmp(r#"{"labels": ["a", "b"], "d": [[0, 1], [1, 0]]}"#);
        match load_space(f.path()).unwrap() {
            Space::Finite(s) => {
                assert_eq!(s.len(), 2);
                assert_eq!(s.labels(), ["a", "b"]);
            }
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn continuous_families() {
        let f = tmp(r#"{"family": "max_on_rplus"}"#);
        assert!(matches!(
            load_space(f.path()).unwrap(),
            Space::Continuous(ContinuousSpace::MaxOnRPlus)
        ));
        let f = tmp(r#"{"family": "weighted", "params": {"expr": "min(x, 1)"}}"#);
        assert!(matches!(
            load_space(f.path()).unwrap(),
            Space::Continuous(ContinuousSpace::Weighted { .. })
        ));
    }

    #[test]
    fn rejects_nan_and_bad_families() {
        let f = tmp(r#"{"d": [[0, null], [1, 0]]}"#);
        assert!(load_space(f.path()).is_err());
        let f = tmp(r#"{"family": "euclidean"}"#);
        assert!(load_space(f.path()).is_err());
    }

    #[test]
    fn map_files() {
        let f = tmp(r#"{"table": [1, 0]}"#);
        assert!(matches!(load_map(f.path()).unwrap(), MapSpec::Table(t) if t == vec![1, 0]));
        let f = tmp(r#"{"family": "halving"}"#);
        assert!(matches!(
            load_map(f.path()).unwrap(),
            MapSpec::Scalar(ScalarMap::Halving)
        ));
        let f = tmp(r#"{"family": "affine", "params": {"a": 0.5, "b": 1.0}}"#);
        assert!(matches!(
            load_map(f.path()).unwrap(),
            MapSpec::Scalar(ScalarMap::Affine { a, b }) if a == 0.5 && b == 1.0
        ));
        let f = tmp(r#"{"expr": "max(x/2, 0)"}"#);
        match load_map(f.path()).unwrap() {
            MapSpec::Scalar(m) => {
                use pmetric_core::contraction::SelfMap;
                assert_eq!(m.apply(&4.0), 2.0);
            }
            _ => panic!("expected scalar"),
        }
    }

    #[test]
    fn gauge_specs() {
        assert!(matches!(parse_gauge("linear:0.5").unwrap(), Gauge::Linear(a) if a == 0.5));
        assert!(matches!(parse_gauge("rational").unwrap(), Gauge::Rational));
        assert!(matches!(parse_gauge("expsat").unwrap(), Gauge::ExpSaturating));
        let g = parse_gauge("expr:t/(1+t)").unwrap();
        assert!((g.eval(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(parse_gauge("linear:x").is_err());
        assert!(parse_gauge("quadratic").is_err());
    }

    #[test]
    fn sequences() {
        let f = tmp("1.0\n2.0\n\n3.5\n");
        assert!(matches!(load_sequence(f.path()).unwrap(), Sequence::Reals(v) if v.len() == 3));
        let f = tmp("p0\np1\np0\n");
        assert!(matches!(load_sequence(f.path()).unwrap(), Sequence::Labels(v) if v.len() == 3));
    }

    #[test]
    fn campaign_config() {
        let f = tmp(
            r#"{"count": 10, "seed": 1, "n": 4, "w_max": 2.0,
                "map_sampler": {"kind": "contraction_biased", "pull": 0.7},
                "gauge": {"family": "linear", "alpha_min": 0.0, "alpha_max": 0.9},
                "g": "b"}"#,
        );
        let cfg = load_campaign(f.path()).unwrap();
        assert_eq!(cfg.count, 10);
        assert_eq!(cfg.tol, 1e-9);
        assert_eq!(cfg.base.seed, 1);
        assert!(cfg.base.ablation.is_none());
    }
}
