//! Experiment orchestration: replica-parallel Monte Carlo with deterministic
//! merge, compared against the formula modules.

use rayon::prelude::*;

use crate::functionals::{
    f_n_statistic, reference_local_time, theorem3_statistic, RESOLUTION_FACTOR,
};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::ks::ks_two_sample;
use crate::limit_moments::{
    determinacy_check, limit_moment, moment_upper_bound, sample_limit_mixture,
    sample_limit_mixture_directed, MixtureGrid,
    MomentQuery,
};
use crate::slnd::estimate_kappa_slnd;
use crate::spectral_constants::{compute_c, compute_c_oracle, compute_d, verify_d_limit};
use crate::{Error, Result};

/// How a report row's pass flag is recomputed from its stored numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// |value − target| ≤ tolerance·|target|
    RelWithin,
    /// |value − target| ≤ tolerance
    AbsWithin,
    /// value ≥ target
    AtLeast,
    /// value ≤ target
    AtMost,
    /// informational; never fails
    Info,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::RelWithin => "rel_within",
            Self::AbsWithin => "abs_within",
            Self::AtLeast => "at_least",
            Self::AtMost => "at_most",
            Self::Info => "info",
        }
    }

    pub fn evaluate(&self, value: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Self::RelWithin => (value - target).abs() <= tolerance * target.abs(),
            Self::AbsWithin => (value - target).abs() <= tolerance,
            Self::AtLeast => value >= target,
            Self::AtMost => value <= target,
            Self::Info => true,
        }
    }
}

/// One comparison: value with uncertainty against a target under a rule.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub metric: String,
    pub param: String,
    pub value: f64,
    pub uncertainty: f64,
    pub target: f64,
    pub tolerance: f64,
    pub check: CheckKind,
    pub pass: bool,
}

impl CheckRow {
    fn new(
        metric: &str,
        param: String,
        value: f64,
        uncertainty: f64,
        target: f64,
        tolerance: f64,
        check: CheckKind,
    ) -> Self {
        Self {
            metric: metric.to_string(),
            param,
            value,
            uncertainty,
            target,
            tolerance,
            pass: check.evaluate(value, target, tolerance),
            check,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<CheckRow>,
    pub summary: Vec<String>,
    pub passed: bool,
}

impl ExperimentReport {
    fn assemble(kind: ExperimentKind, rows: Vec<CheckRow>, mut summary: Vec<String>) -> Self {
        let passed = rows.iter().all(|r| r.pass);
        summary.push(format!(
            "overall: {}",
            if passed { "PASS" } else { "FAIL" }
        ));
        Self {
            kind,
            rows,
            summary,
            passed,
        }
    }
}

/// Central sample moments with plug-in standard errors.
struct SampleStats {
    n: usize,
    mean: f64,
    se_mean: f64,
    var: f64,
    se_var: f64,
    m3: f64,
    m4: f64,
    se_m4: f64,
}

fn central_stats(x: &[f64]) -> SampleStats {
    let n = x.len();
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let mut c = [0.0f64; 8];
    for &v in x {
        let d = v - mean;
        let mut p = d;
        for slot in &mut c {
            *slot += p;
            p *= d;
        }
    }
    for slot in &mut c {
        *slot /= nf;
    }
    let (var, m3, m4, m8) = (c[1], c[2], c[3], c[7]);
    SampleStats {
        n,
        mean,
        se_mean: (var / nf).sqrt(),
        var,
        se_var: ((m4 - var * var).max(0.0) / nf).sqrt(),
        m3,
        m4,
        se_m4: ((m8 - m4 * m4).max(0.0) / nf).sqrt(),
    }
}

fn with_pool<T: Send>(
    threads: usize,
    job: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    pool.install(job)
}

fn replica_err(replica: usize, stage: &str, e: Error) -> Error {
    Error::Domain(format!("replica {replica}, stage {stage}: {e}"))
}

/// Residuals of y after least-squares removal of a quadratic function of x
/// (Gram–Schmidt on the centered monomials, so no linear solve is needed).
fn regress_out(y: &[f64], x: &[f64]) -> Vec<f64> {
    let nf = y.len() as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let mut resid: Vec<f64> = y.iter().map(|&v| v - ym).collect();
    let mut basis: Vec<Vec<f64>> = vec![
        x.iter().map(|&u| u - xm).collect(),
        x.iter().map(|&u| (u - xm) * (u - xm)).collect(),
    ];
    for j in 0..basis.len() {
        let (head, tail) = basis.split_at_mut(j);
        for b in head.iter() {
            let bb: f64 = b.iter().map(|&v| v * v).sum();
            if bb > 0.0 {
                let bt: f64 = b.iter().zip(tail[0].iter()).map(|(&u, &v)| u * v).sum();
                let c = bt / bb;
                for (t, &u) in tail[0].iter_mut().zip(b.iter()) {
                    *t -= c * u;
                }
            }
        }
        let cm = tail[0].iter().sum::<f64>() / nf;
        for t in tail[0].iter_mut() {
            *t -= cm;
        }
        let bb: f64 = tail[0].iter().map(|&v| v * v).sum();
        if bb > 0.0 {
            let br: f64 = tail[0].iter().zip(&resid).map(|(&u, &v)| u * v).sum();
            let c = br / bb;
            for (r, &u) in resid.iter_mut().zip(tail[0].iter()) {
                *r -= c * u;
            }
        }
    }
    resid
}

/// Conditional-moment normalization of y given a scalar covariate x: strip a
/// quadratic-in-x conditional mean, fit an affine-in-x conditional variance
/// to the squared residuals, and return the studentized residuals. If y is
/// conditionally Gaussian given x with a smooth conditional mean and a
/// conditional variance affine in x, the output is approximately standard
/// normal regardless of the law of x.
fn studentize(y: &[f64], x: &[f64]) -> Vec<f64> {
    let resid = regress_out(y, x);
    let nf = y.len() as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let sq: Vec<f64> = resid.iter().map(|&v| v * v).collect();
    let sm = sq.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&u| (u - xm) * (u - xm)).sum();
    let sxy: f64 = x.iter().zip(&sq).map(|(&u, &v)| (u - xm) * (v - sm)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let floor = 1e-3 * sm;
    resid
        .iter()
        .zip(x)
        .map(|(&r, &u)| r / (sm + slope * (u - xm)).max(floor).sqrt())
        .collect()
}

/// Full normalization for the distributional comparison: restrict to
/// replicas whose directing local time exceeds its empirical lower quartile
/// (the conditional central limit behaviour degenerates as the directing
/// variance approaches zero, where the occupation error is one-sided),
/// studentize against the directing local time, and align the median (equal
/// to the mean under the conditionally Gaussian hypothesis, but insensitive
/// to the odd-moment transient that the skew rows already track). The same
/// map is applied to both samples, so the comparison is distribution-free
/// under the mixture hypothesis.
fn normalize_for_ks(y: &[f64], x: &[f64]) -> Vec<f64> {
    let mut xs = x.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = xs[xs.len() / 4];
    let (mut yt, mut xt) = (Vec::new(), Vec::new());
    for (i, &u) in x.iter().enumerate() {
        if u >= cut {
            yt.push(y[i]);
            xt.push(u);
        }
    }
    let mut z = studentize(&yt, &xt);
    let mut zs = z.clone();
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = zs[zs.len() / 2];
    for v in &mut z {
        *v -= med;
    }
    z
}

/// Bandwidth ceiling n ≤ 8^{-1/H}/dt for the configured grid.
fn max_admissible(cfg: &ExperimentConfig) -> f64 {
    let dt = cfg.t_max / cfg.n_steps as f64;
    RESOLUTION_FACTOR.powf(-1.0 / cfg.spec.h_eff()) / dt
}

fn admissible_sweep(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let cap = max_admissible(cfg);
    let sweep: Vec<f64> = cfg.n_list.iter().cloned().filter(|&n| n <= cap).collect();
    if sweep.is_empty() {
        return Err(Error::Validation(format!(
            "no admissible bandwidth level: all of n_list exceed {cap:.3e} for this grid"
        )));
    }
    Ok(sweep)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.kind {
        ExperimentKind::VerifyClt | ExperimentKind::VerifyCritical => run_verify_law(cfg),
        ExperimentKind::VerifyDegenerate => run_verify_degenerate(cfg),
        ExperimentKind::SlndAudit => run_slnd_audit(cfg),
        ExperimentKind::Constants => run_constants(cfg),
        ExperimentKind::Moments => run_moments(cfg),
    }
}

/// Theorems 1.1 and 1.2: the law of F_n approaches the mixture √const·W(L).
fn run_verify_law(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let h = cfg.spec.h_eff();
    let d = cfg.spec.dimension;
    let critical = cfg.kind == ExperimentKind::VerifyCritical;
    let constant = if critical {
        compute_d(h, d, &cfg.f, cfg.sigma, cfg.f.beta())?
    } else {
        compute_c(h, d, &cfg.f, cfg.sigma)?.value
    };
    let sweep = admissible_sweep(cfg)?;
    let t_last = *cfg
        .t_list
        .last()
        .ok_or_else(|| Error::Validation("t_list must be nonempty".into()))?;

    // evaluation times: configured t_list plus the interval endpoints
    let mut eval_times = cfg.t_list.clone();
    for &(a, b) in &cfg.intervals {
        for v in [a, b] {
            if v > 0.0 && !eval_times.iter().any(|&t| (t - v).abs() < 1e-15) {
                eval_times.push(v);
            }
        }
    }
    eval_times.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let time_idx = |t: f64| -> usize {
        eval_times
            .iter()
            .position(|&u| (u - t).abs() < 1e-15)
            .expect("endpoint registered above")
    };
    let last_idx = time_idx(t_last);

    // replica payload: F_{n_k}(eval_times[j]) plus the reference local time
    // at t_last (used to strip the finite-scale conditional-mean component
    // before the distributional comparison)
    type Replica = (Vec<Vec<f64>>, f64);
    let data: Vec<Replica> = with_pool(cfg.threads, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| {
                let sampler =
                    crate::simulate::PathSampler::new(cfg.spec, cfg.t_max, cfg.n_steps)
                        .map_err(|e| replica_err(r, "sampler", e))?;
                let path = sampler.sample(cfg.seed, r as u64);
                let vals = sweep
                    .iter()
                    .map(|&n| {
                        Ok(
                            f_n_statistic(&path, &cfg.f, &cfg.lambda, n, &eval_times)
                                .map_err(|e| replica_err(r, "statistic", e))?
                                .values,
                        )
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                let lref = reference_local_time(&path, &cfg.lambda, t_last)
                    .map_err(|e| replica_err(r, "reference local time", e))?;
                Ok((vals, lref))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let values: Vec<&Vec<Vec<f64>>> = data.iter().map(|r| &r.0).collect();
    let lhat: Vec<f64> = data.iter().map(|r| r.1).collect();

    // Cross-scale variance deflation. The measured statistic centers with a
    // reference local-time estimate built from the same path; the reference
    // carries the fluctuation of every scale finer than n up to the grid,
    // and that shared component is subtracted from F_n. Telescoping the
    // estimate across dyadic scales gives Corr(F_n, F_m) ≈ (n/m)^{(1-Hd)/2}
    // for n < m, so the variance of the centered statistic approaches
    // (1 - (n/m_ref)^{1-Hd}) times the limit rather than the limit itself.
    // m_ref is the effective scale of the reference: the grid scale 1/dt in
    // one dimension (exact interpolant occupation density), the finest
    // admissible kernel scale otherwise. In the critical regime variances
    // grow logarithmically in scale and the same telescoping gives the
    // ln-ratio form.
    let dt = cfg.t_max / cfg.n_steps as f64;
    let m_ref = if d == 1 { 1.0 / dt } else { max_admissible(cfg) };
    let hd = h * d as f64;
    let deflation = |n: f64| -> f64 {
        if cfg.f.total_mass() == 0.0 {
            return 1.0; // no centering term at all
        }
        if critical {
            (1.0 - n.ln() / m_ref.ln()).max(0.0)
        } else {
            1.0 - (n / m_ref).powf(1.0 - hd)
        }
    };

    let make_query = |m_vec: Vec<usize>, intervals: Vec<(f64, f64)>| {
        MomentQuery::new(intervals, m_vec, cfg.lambda.clone(), cfg.spec, constant)
    };
    let m2 = limit_moment(&make_query(vec![2], vec![(0.0, t_last)])?, cfg.qmc_points, cfg.seed)?;
    let m4 = limit_moment(&make_query(vec![4], vec![(0.0, t_last)])?, cfg.qmc_points, cfg.seed)?;

    let mut rows = Vec::new();
    let mut summary = vec![format!(
        "{}: {} over n = {:?}, R = {}, grid N = {}, limiting constant = {:.6e}",
        cfg.kind.name(),
        cfg.spec.describe(),
        sweep,
        cfg.replications,
        cfg.n_steps,
        constant
    )];

    // normalized gap |var/(deflation·target) − 1| per sweep level, with its
    // noise scale, for the monotone-approach check
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    let mut skews: Vec<(f64, f64)> = Vec::new();
    let skew_se = (6.0 / cfg.replications as f64).sqrt();
    for (k, &n) in sweep.iter().enumerate() {
        let f_last: Vec<f64> = values.iter().map(|r| r[k][last_idx]).collect();
        let st = central_stats(&f_last);
        let is_last = k + 1 == sweep.len();
        let target = m2.value * deflation(n);
        gaps.push(((st.var / target - 1.0).abs(), st.se_var / target));
        rows.push(CheckRow::new(
            "var_f",
            format!("{n}"),
            st.var,
            st.se_var,
            target,
            cfg.tol_var,
            if is_last { CheckKind::RelWithin } else { CheckKind::Info },
        ));
        let skew = st.m3 / st.var.powf(1.5);
        skews.push((skew, skew_se));
        rows.push(CheckRow::new(
            "skew_f",
            format!("{n}"),
            skew,
            skew_se,
            0.0,
            0.0,
            CheckKind::Info,
        ));
        if is_last {
            // finite-scale mean offset is deterministic and O(n^{-(1-Hd)/2});
            // reported, not enforced
            rows.push(CheckRow::new(
                "mean_f",
                format!("{n}"),
                st.mean,
                st.se_mean,
                0.0,
                0.0,
                CheckKind::Info,
            ));
            // fourth moment as kurtosis: m4/var² has limit 3·E[L²]/E[L]² and
            // is invariant under the cross-scale deflation, unlike m4 itself
            let kurt = st.m4 / (st.var * st.var);
            let kurt_se = st.se_m4 / (st.var * st.var)
                + 2.0 * st.m4 * st.se_var / st.var.powi(3);
            rows.push(CheckRow::new(
                "kurt_f",
                format!("{n}"),
                kurt,
                kurt_se,
                m4.value / (m2.value * m2.value),
                cfg.tol_m4,
                if critical { CheckKind::Info } else { CheckKind::RelWithin },
            ));
        }
    }

    // monotone approach: the normalized variance gap may not grow by more
    // than the local noise scale across the sweep
    let regressions = gaps
        .windows(2)
        .filter(|w| w[1].0 > w[0].0 + w[0].1 + w[1].1)
        .count();
    rows.push(CheckRow::new(
        "var_gap_regressions",
        "-".into(),
        regressions as f64,
        0.0,
        0.0,
        0.0,
        CheckKind::AtMost,
    ));

    // odd moments vanish in the limit: |skewness| must not grow across the
    // sweep beyond the joint noise scale
    let skew_regressions = skews
        .windows(2)
        .filter(|w| w[1].0.abs() > w[0].0.abs() + 2.0 * (w[0].1 + w[1].1))
        .count();
    rows.push(CheckRow::new(
        "skew_regressions",
        "-".into(),
        skew_regressions as f64,
        0.0,
        0.0,
        0.0,
        CheckKind::AtMost,
    ));

    // disjoint increments at the largest n
    let kl = sweep.len() - 1;
    if cfg.intervals.len() >= 2 {
        let d1: Vec<f64> = values
            .iter()
            .map(|r| {
                let (a, b) = cfg.intervals[0];
                let fa = if a == 0.0 { 0.0 } else { r[kl][time_idx(a)] };
                r[kl][time_idx(b)] - fa
            })
            .collect();
        let d2: Vec<f64> = values
            .iter()
            .map(|r| {
                let (a, b) = cfg.intervals[1];
                r[kl][time_idx(b)] - r[kl][time_idx(a)]
            })
            .collect();
        let cross: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| x * y).collect();
        let st = central_stats(&cross);
        rows.push(CheckRow::new(
            "cross_mean",
            format!("{}", sweep[kl]),
            st.mean,
            st.se_mean,
            0.0,
            4.0 * st.se_mean,
            CheckKind::AbsWithin,
        ));
        if !critical {
            let m22 = limit_moment(
                &make_query(vec![2, 2], cfg.intervals[..2].to_vec())?,
                cfg.qmc_points,
                cfg.seed,
            )?;
            let prod: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| x * x * y * y).collect();
            let stp = central_stats(&prod);
            // reported against the limit value; at desk scale the product
            // moment mixes the deflation with the conditional-mean component,
            // so it is informational rather than enforced
            rows.push(CheckRow::new(
                "cross_m22",
                format!("{}", sweep[kl]),
                stp.mean,
                stp.se_mean,
                m22.value,
                cfg.tol_m4,
                CheckKind::Info,
            ));
        }
    }

    // distributional comparison at the largest n. Conditionally on the path,
    // the limit law is a centered Gaussian whose variance is directed by the
    // local time; at the desk scale the measured statistic carries, on top of
    // that, a conditional mean that is smooth in the local time and a
    // variance modulation from the cross-scale drag. Both samples therefore
    // go through the identical conditional-moment normalization against
    // their own directing local time (see normalize_for_ks), which maps the
    // mixture law to a standard normal. The comparison tests what the scale
    // rows above do not: conditional Gaussianity of the statistic given the
    // local time.
    let level = sweep[kl];
    let f_raw: Vec<f64> = values.iter().map(|r| r[kl][last_idx]).collect();
    let f_norm = normalize_for_ks(&f_raw, &lhat);
    let mixture = sample_limit_mixture_directed(
        cfg.spec,
        &[(0.0, t_last)],
        constant * deflation(level),
        &cfg.lambda,
        cfg.replications,
        MixtureGrid {
            n_steps: cfg.n_steps,
            level,
        },
        cfg.seed ^ 0x9E37_79B9_7F4A_7C15,
    )?;
    let mix_raw: Vec<f64> = mixture.iter().map(|r| r.0[0]).collect();
    let mix_dir: Vec<f64> = mixture.iter().map(|r| r.1).collect();
    let mix_norm = normalize_for_ks(&mix_raw, &mix_dir);
    let ks = ks_two_sample(&f_norm, &mix_norm)?;
    rows.push(CheckRow::new(
        "ks_p",
        format!("{level}"),
        ks.p_approx,
        ks.d,
        cfg.tol_ks_p,
        0.0,
        CheckKind::AtLeast,
    ));
    summary.push(format!(
        "largest n = {level}: normalized var gap = {:.4e} (limit target {:.4e}, deflation {:.4}), KS D = {:.4e}, p = {:.3}",
        gaps.last().unwrap().0,
        m2.value,
        deflation(level),
        ks.d,
        ks.p_approx
    ));
    for row in &rows {
        summary.push(describe_row(row));
    }
    Ok(ExperimentReport::assemble(cfg.kind, rows, summary))
}

/// Theorem 1.3: the centered occupation functional tracks the
/// derivative-of-local-time expansion; the squared gap shrinks in n.
fn run_verify_degenerate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let sweep = admissible_sweep(cfg)?;
    if sweep.len() < 2 {
        return Err(Error::Validation(
            "verify-thm3 needs at least two admissible bandwidth levels".into(),
        ));
    }
    let t_last = *cfg.t_list.last().unwrap();
    let sq_gaps: Vec<Vec<f64>> = with_pool(cfg.threads, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| {
                let sampler =
                    crate::simulate::PathSampler::new(cfg.spec, cfg.t_max, cfg.n_steps)
                        .map_err(|e| replica_err(r, "sampler", e))?;
                let path = sampler.sample(cfg.seed, r as u64);
                sweep
                    .iter()
                    .map(|&n| {
                        let pair = theorem3_statistic(&path, &cfg.f, &cfg.lambda, n, t_last)
                            .map_err(|e| replica_err(r, "statistic", e))?;
                        Ok((pair.lhs - pair.rhs).powi(2))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (k, &n) in sweep.iter().enumerate() {
        let col: Vec<f64> = sq_gaps.iter().map(|r| r[k]).collect();
        let st = central_stats(&col);
        means.push(st.mean);
        rows.push(CheckRow::new(
            "msq_gap",
            format!("{n}"),
            st.mean,
            st.se_mean,
            0.0,
            0.0,
            CheckKind::Info,
        ));
    }
    let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
    let avg_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    rows.push(CheckRow::new(
        "msq_decay_ratio",
        "-".into(),
        avg_ratio,
        0.0,
        0.8,
        0.0,
        CheckKind::AtMost,
    ));
    let mut summary = vec![format!(
        "{}: {} squared-gap means {:?}, mean decay ratio {:.3}",
        cfg.kind.name(),
        cfg.spec.describe(),
        means,
        avg_ratio
    )];
    for row in &rows {
        summary.push(describe_row(row));
    }
    Ok(ExperimentReport::assemble(cfg.kind, rows, summary))
}

fn run_slnd_audit(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let kappa = estimate_kappa_slnd(&cfg.spec, cfg.slnd_trials, cfg.slnd_m_max, cfg.seed)?;
    let spectral = cfg.spec.check_slnd_spectral(100.0, 2001);
    let rows = vec![
        CheckRow::new(
            "kappa_hat",
            format!("trials={}", cfg.slnd_trials),
            kappa.kappa_hat,
            0.0,
            1e-12,
            0.0,
            CheckKind::AtLeast,
        ),
        CheckRow::new(
            "spectral_c_hat",
            "lambda<=100".into(),
            spectral.c_hat,
            0.0,
            1e-12,
            0.0,
            CheckKind::AtLeast,
        ),
    ];
    let mut summary = vec![format!(
        "slnd-audit: {} kappa_hat = {:.6e}, spectral c_hat = {:.6e} (min at lambda = {:.3})",
        cfg.spec.describe(),
        kappa.kappa_hat,
        spectral.c_hat,
        spectral.lambda_at_min
    )];
    for row in &rows {
        summary.push(describe_row(row));
    }
    Ok(ExperimentReport::assemble(cfg.kind, rows, summary))
}

fn run_constants(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let h = cfg.spec.h_eff();
    let d = cfg.spec.dimension;
    let mut rows = Vec::new();
    let mut summary = vec![format!("constants: {}", cfg.spec.describe())];

    // variance scale of the increments (Assumption A) on a dyadic grid
    let t_grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    let eps_grid = [1e-1, 1e-2, 1e-3, 1e-4];
    let assumption_a = cfg.spec.check_assumption_a(&t_grid, &eps_grid, 0.01)?;
    rows.push(CheckRow::new(
        "sigma_hat",
        "-".into(),
        assumption_a.sigma_hat,
        0.0,
        assumption_a.sigma_hat,
        0.0,
        CheckKind::Info,
    ));
    let phi_final = assumption_a.phi_envelope.last().map(|&(_, p)| p).unwrap_or(f64::NAN);
    rows.push(CheckRow::new(
        "phi_hat_final",
        format!("eps={:.1e}", eps_grid[eps_grid.len() - 1]),
        phi_final,
        0.0,
        1e-2,
        0.0,
        CheckKind::AtMost,
    ));

    match compute_c(h, d, &cfg.f, assumption_a.sigma_hat) {
        Ok(c) => {
            rows.push(CheckRow::new(
                "c_value",
                "-".into(),
                c.value,
                c.rel_err * c.value.abs(),
                c.value,
                0.0,
                CheckKind::Info,
            ));
            if d == 1 && cfg.f.family != crate::functionals::KernelFamily::Box {
                let oracle = compute_c_oracle(h, &cfg.f, assumption_a.sigma_hat)?;
                rows.push(CheckRow::new(
                    "c_oracle_rel_dev",
                    "-".into(),
                    ((c.value - oracle) / oracle).abs(),
                    0.0,
                    1e-5,
                    0.0,
                    CheckKind::AtMost,
                ));
            }
        }
        Err(Error::Hypothesis(msg)) | Err(Error::Integrability(msg)) => {
            summary.push(format!("C not defined here: {msg}"));
        }
        Err(e) => return Err(e),
    }

    let threshold = 1.0 / (2.0 * cfg.f.beta() as f64 + d as f64);
    if (h - threshold).abs() <= 1e-9 {
        let dv = compute_d(h, d, &cfg.f, assumption_a.sigma_hat, cfg.f.beta())?;
        rows.push(CheckRow::new(
            "d_value",
            "-".into(),
            dv,
            0.0,
            dv,
            0.0,
            CheckKind::Info,
        ));
        let n_list = [1e2, 1e4, 1e6];
        let vals = verify_d_limit(h, d, &cfg.f, assumption_a.sigma_hat, &n_list)?;
        let gaps: Vec<f64> = vals.iter().map(|v| (v - dv).abs()).collect();
        for (i, (&n, &g)) in n_list.iter().zip(&gaps).enumerate() {
            rows.push(CheckRow::new(
                "d_limit_gap",
                format!("{n:.0e}"),
                g,
                0.0,
                if i == 0 { f64::INFINITY } else { 0.7 * gaps[i - 1] },
                0.0,
                CheckKind::AtMost,
            ));
        }
    }
    for row in &rows {
        summary.push(describe_row(row));
    }
    Ok(ExperimentReport::assemble(cfg.kind, rows, summary))
}

fn run_moments(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let h = cfg.spec.h_eff();
    let d = cfg.spec.dimension;
    let constant = match compute_c(h, d, &cfg.f, cfg.sigma) {
        Ok(c) => c.value,
        Err(Error::Hypothesis(_)) | Err(Error::Integrability(_)) => 1.0,
        Err(e) => return Err(e),
    };
    let query = MomentQuery::new(
        cfg.intervals.clone(),
        cfg.m_vec.clone(),
        cfg.lambda.clone(),
        cfg.spec,
        constant,
    )?;
    let formula = limit_moment(&query, cfg.qmc_points, cfg.seed)?;
    let mut rows = vec![CheckRow::new(
        "moment_formula",
        format!("m={:?}", cfg.m_vec),
        formula.value,
        formula.se,
        formula.value,
        0.0,
        CheckKind::Info,
    )];
    let mut summary = vec![format!(
        "moments: {} m = {:?} over {:?}, C = {:.6e}, formula = {:.6e} ± {:.2e} ({} degenerate points skipped)",
        cfg.spec.describe(),
        cfg.m_vec,
        cfg.intervals,
        constant,
        formula.value,
        formula.se,
        formula.skipped
    )];

    let all_even = cfg.m_vec.iter().all(|m| m % 2 == 0);
    if all_even && h * (d as f64) < 1.0 {
        let kappa = estimate_kappa_slnd(&cfg.spec, 500, 4, cfg.seed)?;
        let bound = moment_upper_bound(&query, kappa.kappa_hat.min(1.0))?;
        rows.push(CheckRow::new(
            "moment_vs_bound",
            format!("kappa={:.3e}", kappa.kappa_hat.min(1.0)),
            formula.value,
            formula.se,
            bound + 4.0 * formula.se,
            0.0,
            CheckKind::AtMost,
        ));
    }

    // cross-validate against the simulated mixture
    let level = max_admissible(cfg).max(2.0);
    let samples = sample_limit_mixture(
        cfg.spec,
        &cfg.intervals,
        constant,
        &cfg.lambda,
        cfg.replications,
        MixtureGrid {
            n_steps: cfg.n_steps,
            level,
        },
        cfg.seed,
    )?;
    let prod: Vec<f64> = samples
        .iter()
        .map(|row| {
            row.iter()
                .zip(&cfg.m_vec)
                .map(|(v, &m)| v.powi(m as i32))
                .product()
        })
        .collect();
    let st = central_stats(&prod);
    let emp = st.mean;
    rows.push(CheckRow::new(
        "moment_mixture",
        format!("R={}", st.n),
        emp,
        st.se_mean,
        formula.value,
        4.0 * (st.se_mean + formula.se) + 0.05 * formula.value.abs() + 1e-6,
        CheckKind::AbsWithin,
    ));

    // determinacy audit of the simulated mixture's marginal moments
    let table: Vec<Vec<f64>> = (0..cfg.intervals.len())
        .map(|i| {
            (1..=12)
                .map(|k| {
                    samples.iter().map(|row| row[i].powi(k)).sum::<f64>()
                        / samples.len() as f64
                })
                .collect()
        })
        .collect();
    let det = determinacy_check(&table);
    rows.push(CheckRow::new(
        "determinacy",
        format!("r_hat_max={:.3e}", det.r_hat.iter().cloned().fold(0.0, f64::max)),
        if det.determinate { 1.0 } else { 0.0 },
        0.0,
        0.0,
        0.0,
        CheckKind::Info,
    ));
    for row in &rows {
        summary.push(describe_row(row));
    }
    Ok(ExperimentReport::assemble(cfg.kind, rows, summary))
}

fn describe_row(r: &CheckRow) -> String {
    format!(
        "  [{}] {} ({}) = {:.6e} ± {:.2e}, target {:.6e}, tol {:.3e}, {}",
        if r.pass { "ok" } else { "FAIL" },
        r.metric,
        r.param,
        r.value,
        r.uncertainty,
        r.target,
        r.tolerance,
        r.check.name()
    )
}
