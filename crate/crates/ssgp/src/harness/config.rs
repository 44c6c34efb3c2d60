//! Flat `key = value` experiment configuration with dotted keys for nesting.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::functionals::{classify_regime, KernelFamily, TestFunction};
use crate::process_models::ProcessSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Theorem 1.1 regime: Monte Carlo law-of-F_n verification, H above the
    /// threshold 1/(2β+d).
    VerifyClt,
    /// Critical regime H = 1/(2β+d) with logarithmic normalization.
    VerifyCritical,
    /// Degenerate regime H < 1/(2β+d), d = 1: derivative-of-local-time limit.
    VerifyDegenerate,
    /// Conditional-variance and spectral lower-bound audit.
    SlndAudit,
    /// Limiting-constant computations with oracle cross-checks.
    Constants,
    /// Exact moment formula vs simulated mixture.
    Moments,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VerifyClt => "verify-clt",
            Self::VerifyCritical => "verify-critical",
            Self::VerifyDegenerate => "verify-thm3",
            Self::SlndAudit => "slnd-audit",
            Self::Constants => "constants",
            Self::Moments => "moments",
        }
    }
}

/// Fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub spec: ProcessSpec,
    pub f: TestFunction,
    pub lambda: Vec<f64>,
    pub sigma: f64,
    /// Kernel bandwidth levels n for the F_n sweep.
    pub n_list: Vec<f64>,
    pub t_max: f64,
    pub n_steps: usize,
    pub replications: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub threads: usize,
    /// Relative tolerance on second moments.
    pub tol_var: f64,
    /// Relative tolerance on fourth moments.
    pub tol_m4: f64,
    /// Kolmogorov-Smirnov p-value threshold.
    pub tol_ks_p: f64,
    /// Evaluation times for F_n.
    pub t_list: Vec<f64>,
    /// Disjoint intervals for multi-increment moment checks.
    pub intervals: Vec<(f64, f64)>,
    /// Exponents for the MOMENTS experiment.
    pub m_vec: Vec<usize>,
    /// Quasi-random points per shift for moment quadrature.
    pub qmc_points: usize,
    /// Random conditioning configurations for the SLND audit.
    pub slnd_trials: usize,
    /// Largest conditioning set size for the SLND audit.
    pub slnd_m_max: usize,
}

fn parse_number(line: usize, key: &str, v: &str) -> Result<f64> {
    // accept plain floats and exact fractions like 1/3
    let parsed = if let Some((num, den)) = v.split_once('/') {
        match (num.trim().parse::<f64>(), den.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) if b != 0.0 => Some(a / b),
            _ => None,
        }
    } else {
        v.parse::<f64>().ok()
    };
    parsed.ok_or_else(|| Error::Parse {
        line,
        msg: format!("{key}: expected a number, got `{v}`"),
    })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("{key}: expected a nonnegative integer, got `{v}`"),
    })
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_number(line, key, s.trim()))
        .collect()
}

/// Parse the flat `key = value` config text. `#` starts a comment; unknown or
/// duplicate keys are errors; every value has a documented default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            });
        };
        // keys are case-insensitive (process.H and process.h are the same)
        let key = k.trim().to_lowercase();
        if map
            .insert(key.clone(), (line, v.trim().to_string()))
            .is_some()
        {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }
    let mut take = |key: &str| map.remove(key);

    let kind = match take("kind") {
        Some((line, v)) => match v.as_str() {
            "verify-clt" => ExperimentKind::VerifyClt,
            "verify-critical" => ExperimentKind::VerifyCritical,
            "verify-thm3" | "verify-degenerate" => ExperimentKind::VerifyDegenerate,
            "slnd-audit" => ExperimentKind::SlndAudit,
            "constants" => ExperimentKind::Constants,
            "moments" => ExperimentKind::Moments,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown experiment kind `{other}`"),
                })
            }
        },
        None => {
            return Err(Error::Validation("missing required key `kind`".into()));
        }
    };

    let dimension = match take("process.dimension") {
        Some((line, v)) => parse_usize(line, "process.dimension", &v)?,
        None => 1,
    };
    let family = take("process.family").map(|(_, v)| v);
    let spec = match family.as_deref().unwrap_or("fbm") {
        "fbm" => {
            let h = match take("process.h") {
                Some((line, v)) => parse_number(line, "process.h", &v)?,
                None => 0.5,
            };
            ProcessSpec::fbm(h, dimension).map_err(|e| Error::Validation(e.to_string()))?
        }
        "sub_fbm" => {
            let h = match take("process.h") {
                Some((line, v)) => parse_number(line, "process.h", &v)?,
                None => 0.5,
            };
            ProcessSpec::sub_fbm(h, dimension).map_err(|e| Error::Validation(e.to_string()))?
        }
        "bi_fbm" => {
            let h0 = match take("process.h0") {
                Some((line, v)) => parse_number(line, "process.h0", &v)?,
                None => return Err(Error::Validation("bi_fbm requires process.h0".into())),
            };
            let k0 = match take("process.k0") {
                Some((line, v)) => parse_number(line, "process.k0", &v)?,
                None => return Err(Error::Validation("bi_fbm requires process.k0".into())),
            };
            ProcessSpec::bi_fbm(h0, k0, dimension).map_err(|e| Error::Validation(e.to_string()))?
        }
        other => {
            return Err(Error::Validation(format!(
                "unknown process family `{other}` (expected fbm, sub_fbm or bi_fbm)"
            )))
        }
    };

    let f = match take("f") {
        Some((line, v)) => {
            let fam = match v.as_str() {
                "gauss" => KernelFamily::Gauss,
                "x_gauss" => KernelFamily::XGauss,
                "box" => KernelFamily::Box,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown test function `{other}`"),
                    })
                }
            };
            TestFunction::new(fam, dimension).map_err(|e| Error::Validation(e.to_string()))?
        }
        None => TestFunction::new(KernelFamily::Gauss, dimension).unwrap(),
    };

    let lambda = match take("lambda") {
        Some((line, v)) => parse_list(line, "lambda", &v)?,
        None => vec![0.0; dimension],
    };
    if lambda.len() != dimension {
        return Err(Error::Validation(format!(
            "lambda has {} components, process dimension is {dimension}",
            lambda.len()
        )));
    }

    let sigma = match take("sigma") {
        Some((line, v)) => parse_number(line, "sigma", &v)?,
        None => 1.0,
    };
    let n_list = match take("n_list") {
        Some((line, v)) => parse_list(line, "n_list", &v)?,
        None => vec![16.0, 32.0, 64.0, 128.0, 256.0],
    };
    let t_max = match take("grid.t_max") {
        Some((line, v)) => parse_number(line, "grid.t_max", &v)?,
        None => 1.0,
    };
    let n_steps = match take("grid.n") {
        Some((line, v)) => parse_usize(line, "grid.n", &v)?,
        None => 1 << 14,
    };
    let replications = match take("replications") {
        Some((line, v)) => parse_usize(line, "replications", &v)?,
        None => 2000,
    };
    let seed = match take("seed") {
        Some((line, v)) => v.parse::<u64>().map_err(|_| Error::Parse {
            line,
            msg: format!("seed: expected an unsigned integer, got `{v}`"),
        })?,
        None => 1,
    };
    let out_dir = take("out").map(|(_, v)| PathBuf::from(v));
    let threads = match take("threads") {
        Some((line, v)) => parse_usize(line, "threads", &v)?.max(1),
        None => 1,
    };
    let tol_var = match take("tol.var") {
        Some((line, v)) => parse_number(line, "tol.var", &v)?,
        None => 0.10,
    };
    let tol_m4 = match take("tol.m4") {
        Some((line, v)) => parse_number(line, "tol.m4", &v)?,
        None => 0.15,
    };
    let tol_ks_p = match take("tol.ks_p") {
        Some((line, v)) => parse_number(line, "tol.ks_p", &v)?,
        None => 0.01,
    };
    let t_list = match take("t_list") {
        Some((line, v)) => parse_list(line, "t_list", &v)?,
        None => vec![0.25, 0.5, 0.75, 1.0],
    };
    let intervals = match take("intervals") {
        Some((line, v)) => {
            let flat = parse_list(line, "intervals", &v)?;
            if flat.len() % 2 != 0 || flat.is_empty() {
                return Err(Error::Parse {
                    line,
                    msg: "intervals: expected a1,b1,a2,b2,...".into(),
                });
            }
            flat.chunks(2).map(|c| (c[0], c[1])).collect()
        }
        None => vec![(0.0, 0.25), (0.5, 0.75)],
    };
    let m_vec = match take("moments.m_vec") {
        Some((line, v)) => v
            .split(',')
            .map(|s| parse_usize(line, "moments.m_vec", s.trim()))
            .collect::<Result<Vec<_>>>()?,
        None => vec![2; intervals.len()],
    };
    let qmc_points = match take("moments.points") {
        Some((line, v)) => parse_usize(line, "moments.points", &v)?,
        None => 1 << 16,
    };
    let slnd_trials = match take("slnd.trials") {
        Some((line, v)) => parse_usize(line, "slnd.trials", &v)?,
        None => 2000,
    };
    let slnd_m_max = match take("slnd.m_max") {
        Some((line, v)) => parse_usize(line, "slnd.m_max", &v)?,
        None => 6,
    };

    if let Some((key, (line, _))) = map.into_iter().next() {
        return Err(Error::Parse {
            line,
            msg: format!("unknown key `{key}`"),
        });
    }

    let cfg = ExperimentConfig {
        kind,
        spec,
        f,
        lambda,
        sigma,
        n_list,
        t_max,
        n_steps,
        replications,
        seed,
        out_dir,
        threads,
        tol_var,
        tol_m4,
        tol_ks_p,
        t_list,
        intervals,
        m_vec,
        qmc_points,
        slnd_trials,
        slnd_m_max,
    };
    validate(&cfg)?;
    Ok(cfg)
}

/// Kind-specific hypothesis gating: no experiment may run outside its
/// theorem's parameter region.
fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let h = cfg.spec.h_eff();
    let d = cfg.spec.dimension;
    let beta = cfg.f.beta();
    let threshold = 1.0 / (2.0 * beta as f64 + d as f64);
    if cfg.t_max <= 0.0 || cfg.n_steps == 0 {
        return Err(Error::Validation("grid must be nonempty".into()));
    }
    if cfg.n_list.iter().any(|&n| n <= 1.0) || cfg.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "n_list must be increasing with entries > 1".into(),
        ));
    }
    if cfg.sigma <= 0.0 {
        return Err(Error::Validation("sigma must be positive".into()));
    }
    for w in [cfg.tol_var, cfg.tol_m4, cfg.tol_ks_p] {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::Validation("tolerances must lie in (0,1)".into()));
        }
    }
    match cfg.kind {
        ExperimentKind::VerifyClt => {
            if h <= threshold + 1e-9 || h >= 1.0 / d as f64 {
                return Err(Error::Validation(format!(
                    "verify-clt requires 1/(2β+d) < H < 1/d, i.e. {threshold} < H < {}, got H = {h}",
                    1.0 / d as f64
                )));
            }
        }
        ExperimentKind::VerifyCritical => {
            if (h - threshold).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "verify-critical requires H = 1/(2β+d) = {threshold}, got H = {h}"
                )));
            }
        }
        ExperimentKind::VerifyDegenerate => {
            if d != 1 {
                return Err(Error::Validation(
                    "verify-thm3 supports dimension 1 only".into(),
                ));
            }
            if h >= threshold - 1e-9 {
                return Err(Error::Validation(format!(
                    "verify-thm3 requires H < 1/(2β+d) = {threshold}, got H = {h}"
                )));
            }
            if cfg.n_list.len() < 2 {
                return Err(Error::Validation(
                    "verify-thm3 needs at least two bandwidth levels".into(),
                ));
            }
        }
        ExperimentKind::Moments => {
            if cfg.m_vec.len() != cfg.intervals.len() {
                return Err(Error::Validation(
                    "moments.m_vec must have one exponent per interval".into(),
                ));
            }
        }
        ExperimentKind::SlndAudit | ExperimentKind::Constants => {}
    }
    // surface regime classification problems (e.g. H below threshold for the
    // plain statistic) early rather than mid-run
    if matches!(
        cfg.kind,
        ExperimentKind::VerifyClt | ExperimentKind::VerifyCritical
    ) {
        classify_regime(h, beta, d).map_err(|e| Error::Validation(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_clt_config_parses() {
        let cfg = parse_config(
            "kind = verify-clt\nprocess.family = fbm\nprocess.h = 0.6\nf = gauss\n",
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::VerifyClt);
        assert_eq!(cfg.spec.dimension, 1);
        assert_eq!(cfg.replications, 2000);
        assert_eq!(cfg.t_list, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(cfg.intervals, vec![(0.0, 0.25), (0.5, 0.75)]);
    }

    #[test]
    fn low_h_rejected_for_clt() {
        let err = parse_config("kind = verify-clt\nprocess.h = 0.15\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        assert!(err.to_string().contains("1/(2β+d)") || err.to_string().contains("<"));
    }

    #[test]
    fn critical_accepts_fractional_h() {
        let cfg =
            parse_config("kind = verify-critical\nprocess.h = 1/3\nf = x_gauss\n").unwrap();
        assert_eq!(cfg.kind, ExperimentKind::VerifyCritical);
        assert!((cfg.spec.h_eff() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_is_error_with_line() {
        let err = parse_config("kind = constants\n\nbogus.key = 3\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("bogus.key"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn malformed_line_is_error() {
        let err = parse_config("kind = constants\nnonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_key_is_error() {
        let err = parse_config("kind = constants\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn comments_and_bifbm() {
        let cfg = parse_config(
            "# audit\nkind = slnd-audit\nprocess.family = bi_fbm\nprocess.h0 = 0.6 # Hurst\nprocess.k0 = 0.8\n",
        )
        .unwrap();
        assert!((cfg.spec.h_eff() - 0.48).abs() < 1e-15);
    }

    #[test]
    fn thm3_gating() {
        assert!(parse_config("kind = verify-thm3\nprocess.h = 0.2\nf = x_gauss\n").is_ok());
        assert!(parse_config("kind = verify-thm3\nprocess.h = 0.5\nf = x_gauss\n").is_err());
        assert!(parse_config(
            "kind = verify-thm3\nprocess.h = 0.2\nf = x_gauss\nprocess.dimension = 2\nlambda = 0,0\n"
        )
        .is_err());
    }
}
