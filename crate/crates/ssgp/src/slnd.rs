//! Strong local nondeterminism checks by exact Gaussian conditioning.
//!
//! The conditional variance Var(X_t | X_{s_1}, ..., X_{s_m}) is a Schur
//! complement of the Gram matrix of conditioning times; the sampled minimum
//! of its ratio to min_j |t - s_j|^{2H} is the numeric witness for the
//! lower-bound constant.

use crate::process_models::ProcessSpec;
use crate::rng::stream_rng;
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;

/// Conditioning configuration: predict X_t from observations at `s`.
#[derive(Debug, Clone)]
pub struct ConditioningProblem {
    pub spec: ProcessSpec,
    pub target_time: f64,
    pub conditioning_times: Vec<f64>,
}

impl ConditioningProblem {
    pub fn new(spec: ProcessSpec, target_time: f64, conditioning_times: Vec<f64>) -> Result<Self> {
        if target_time <= 0.0 {
            return Err(Error::Domain("target time must be positive".into()));
        }
        if conditioning_times.is_empty() {
            return Err(Error::Domain("need at least one conditioning time".into()));
        }
        if conditioning_times
            .iter()
            .any(|&s| s <= 0.0 || s >= target_time)
        {
            return Err(Error::Domain(
                "conditioning times must lie in (0, t)".into(),
            ));
        }
        let mut times = conditioning_times;
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self {
            spec,
            target_time,
            conditioning_times: times,
        })
    }
}

/// Var(X^1_t | X^1_{s_1}, ..., X^1_{s_m}) for one coordinate (the
/// d-dimensional conditional variance is d times this).
pub fn conditional_variance(p: &ConditioningProblem) -> Result<f64> {
    let t = p.target_time;
    // deduplicate near-equal conditioning times; the bound is insensitive
    let mut s: Vec<f64> = Vec::with_capacity(p.conditioning_times.len());
    for &v in &p.conditioning_times {
        if s.last().map_or(true, |&last| v - last > 1e-12 * t) {
            s.push(v);
        }
    }
    let m = s.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = p.spec.covariance(s[i], s[j])?;
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let cross = DVector::from_iterator(m, s.iter().map(|&si| p.spec.covariance(si, t).unwrap()));
    let chol = Cholesky::new(gram.clone()).ok_or_else(|| {
        Error::NotPsd("conditioning Gram matrix is singular beyond dedup tolerance".into())
    })?;
    let sol = chol.solve(&cross);
    let var_t = p.spec.covariance(t, t)?;
    Ok((var_t - cross.dot(&sol)).clamp(0.0, var_t))
}

/// Brute-force oracle: residual variance of the best linear predictor found
/// by solving the normal equations with full-pivot LU. Independent of the
/// Cholesky/Schur route above.
pub fn regression_residual_variance(p: &ConditioningProblem) -> Result<f64> {
    let t = p.target_time;
    let mut s: Vec<f64> = Vec::with_capacity(p.conditioning_times.len());
    for &v in &p.conditioning_times {
        if s.last().map_or(true, |&last| v - last > 1e-12 * t) {
            s.push(v);
        }
    }
    let m = s.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = p.spec.covariance(s[i], s[j])?;
        }
    }
    let cross = DVector::from_iterator(m, s.iter().map(|&si| p.spec.covariance(si, t).unwrap()));
    let beta = gram
        .full_piv_lu()
        .solve(&cross)
        .ok_or_else(|| Error::NotPsd("normal equations singular".into()))?;
    // E (X_t - beta . X_s)^2
    let mut v = p.spec.covariance(t, t)?;
    for i in 0..m {
        v -= 2.0 * beta[i] * cross[i];
        for j in 0..m {
            v += beta[i] * beta[j] * p.spec.covariance(s[i], s[j])?;
        }
    }
    Ok(v.max(0.0))
}

#[derive(Debug, Clone)]
pub struct KappaEstimate {
    pub kappa_hat: f64,
    pub worst_case: ConditioningProblem,
}

/// Sampled minimum of conditional_variance / min_j |t - s_j|^{2H}.
///
/// Configurations draw t uniformly from [0.1, 10] and sorted uniforms for
/// the s_j, with a share of adversarial clusters (all s_j within 1e-3 of
/// each other or of t) to stress the minimum-gap normalization.
pub fn estimate_kappa_slnd(
    spec: &ProcessSpec,
    trials: usize,
    m_max: usize,
    seed: u64,
) -> Result<KappaEstimate> {
    if trials == 0 || m_max == 0 {
        return Err(Error::Domain("trials and m_max must be positive".into()));
    }
    let h2 = 2.0 * spec.h_eff();
    let mut rng = stream_rng(seed, 0);
    let mut best: Option<KappaEstimate> = None;
    for _ in 0..trials {
        let t: f64 = rng.random_range(0.1..10.0);
        let m = rng.random_range(1..=m_max);
        let style: f64 = rng.random();
        let mut s: Vec<f64> = if style < 0.15 {
            // cluster near each other
            let center: f64 = rng.random_range(0.05 * t..0.95 * t);
            (0..m)
                .map(|_| (center + rng.random_range(-5e-4..5e-4) * t).clamp(1e-6, t * (1.0 - 1e-9)))
                .collect()
        } else if style < 0.3 {
            // cluster just below t
            (0..m)
                .map(|_| t * (1.0 - rng.random_range(1e-6..1e-3)))
                .collect()
        } else {
            (0..m).map(|_| rng.random_range(1e-3 * t..t)).collect()
        };
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s.retain(|&v| v > 0.0 && v < t);
        if s.is_empty() {
            continue;
        }
        let problem = ConditioningProblem::new(*spec, t, s.clone())?;
        let cv = match conditional_variance(&problem) {
            Ok(v) => v,
            Err(Error::NotPsd(_)) => continue,
            Err(e) => return Err(e),
        };
        let min_gap = s.iter().map(|&si| t - si).fold(f64::INFINITY, f64::min);
        let ratio = cv / min_gap.powf(h2);
        if best.as_ref().map_or(true, |b| ratio < b.kappa_hat) {
            best = Some(KappaEstimate {
                kappa_hat: ratio,
                worst_case: problem,
            });
        }
    }
    best.ok_or_else(|| Error::Domain("no valid configurations sampled".into()))
}

#[derive(Debug, Clone, Copy)]
pub struct LndRatio {
    pub variance: f64,
    pub lower_form: f64,
    pub ratio: f64,
}

/// Variance of sum_i x_i . (X_{s_i} - X_{s_{i-1}}) against the weighted
/// increment-gap form sum_i |x_i|^2 (s_i - s_{i-1})^{2H} (s_0 = 0).
pub fn lnd_ratio(spec: &ProcessSpec, s_list: &[f64], x_list: &[Vec<f64>]) -> Result<LndRatio> {
    let m = s_list.len();
    if m == 0 || x_list.len() != m {
        return Err(Error::Domain(
            "need equal, nonzero numbers of times and weights".into(),
        ));
    }
    if s_list[0] <= 0.0 || s_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("times must satisfy 0 < s_1 <= ... <= s_m".into()));
    }
    let d = spec.dimension;
    if x_list.iter().any(|x| x.len() != d) {
        return Err(Error::Domain(format!("weights must lie in R^{d}")));
    }
    if x_list.iter().all(|x| x.iter().all(|&v| v == 0.0)) {
        return Err(Error::ZeroForm);
    }
    let h2 = 2.0 * spec.h_eff();
    let prev = |i: usize| if i == 0 { 0.0 } else { s_list[i - 1] };
    // increment covariance for one coordinate
    let inc_cov = |i: usize, j: usize| -> Result<f64> {
        Ok(spec.covariance(s_list[i], s_list[j])? - spec.covariance(s_list[i], prev(j))?
            - spec.covariance(prev(i), s_list[j])?
            + spec.covariance(prev(i), prev(j))?)
    };
    let mut variance = 0.0;
    for i in 0..m {
        for j in 0..m {
            let c = inc_cov(i, j)?;
            let dot: f64 = (0..d).map(|k| x_list[i][k] * x_list[j][k]).sum();
            variance += dot * c;
        }
    }
    let lower_form: f64 = (0..m)
        .map(|i| {
            let norm2: f64 = x_list[i].iter().map(|v| v * v).sum();
            norm2 * (s_list[i] - prev(i)).powf(h2)
        })
        .sum();
    let ratio = if lower_form > 0.0 {
        variance / lower_form
    } else {
        f64::INFINITY
    };
    Ok(LndRatio {
        variance,
        lower_form,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bm() -> ProcessSpec {
        ProcessSpec::fbm(0.5, 1).unwrap()
    }

    #[test]
    fn brownian_markov_single_point() {
        let p = ConditioningProblem::new(bm(), 2.0, vec![1.0]).unwrap();
        assert_relative_eq!(conditional_variance(&p).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn brownian_markov_multiple_points() {
        let p = ConditioningProblem::new(bm(), 2.0, vec![0.5, 1.0, 1.5]).unwrap();
        assert_relative_eq!(conditional_variance(&p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn schur_equals_regression_oracle() {
        let spec = ProcessSpec::sub_fbm(0.7, 1).unwrap();
        let p = ConditioningProblem::new(spec, 1.0, vec![0.4, 0.8]).unwrap();
        let schur = conditional_variance(&p).unwrap();
        let reg = regression_residual_variance(&p).unwrap();
        assert!((schur - reg).abs() < 1e-10, "{schur} vs {reg}");
    }

    #[test]
    fn conditioning_is_monotone_and_bounded() {
        let spec = ProcessSpec::bi_fbm(0.6, 0.8, 1).unwrap();
        let mut rng = stream_rng(4, 0);
        for _ in 0..200 {
            let t: f64 = rng.random_range(0.5..5.0);
            let mut s: Vec<f64> = (0..5).map(|_| rng.random_range(0.01 * t..0.99 * t)).collect();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let var_t = spec.covariance(t, t).unwrap();
            let mut prev = f64::INFINITY;
            for k in 1..=5 {
                let p = ConditioningProblem::new(spec, t, s[..k].to_vec()).unwrap();
                let cv = conditional_variance(&p).unwrap();
                assert!(cv <= var_t + 1e-12);
                assert!(cv <= prev + 1e-10, "adding a time increased variance");
                prev = cv;
            }
        }
    }

    #[test]
    fn brownian_kappa_is_one() {
        let est = estimate_kappa_slnd(&bm(), 2000, 6, 9).unwrap();
        assert!(
            (est.kappa_hat - 1.0).abs() < 1e-8,
            "kappa={}",
            est.kappa_hat
        );
    }

    #[test]
    fn lnd_ratio_brownian_exactly_one() {
        let spec = bm();
        let r = lnd_ratio(
            &spec,
            &[0.3, 0.9, 2.0],
            &[vec![1.0], vec![-0.5], vec![2.0]],
        )
        .unwrap();
        assert_relative_eq!(r.ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lnd_single_increment_reduction() {
        let spec = ProcessSpec::sub_fbm(0.3, 1).unwrap();
        let s1 = 0.7;
        let r = lnd_ratio(&spec, &[s1], &[vec![2.0]]).unwrap();
        let var1 = spec.covariance(s1, s1).unwrap();
        assert_relative_eq!(r.variance, 4.0 * var1, epsilon = 1e-12);
        assert_relative_eq!(
            r.ratio,
            var1 / s1.powf(2.0 * spec.h_eff()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn lnd_zero_weights_rejected() {
        let spec = bm();
        assert!(matches!(
            lnd_ratio(&spec, &[1.0], &[vec![0.0]]),
            Err(Error::ZeroForm)
        ));
    }

    #[test]
    fn lnd_sampled_minimum_positive_fbm() {
        let spec = ProcessSpec::fbm(0.7, 1).unwrap();
        let mut rng = stream_rng(12, 0);
        let mut min_ratio = f64::INFINITY;
        for _ in 0..2000 {
            let mut s: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..3.0)).collect();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let x: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
            if x.iter().all(|v| v[0] == 0.0) {
                continue;
            }
            let r = lnd_ratio(&spec, &s, &x).unwrap();
            min_ratio = min_ratio.min(r.ratio);
        }
        assert!(min_ratio > 0.0, "min ratio {min_ratio}");
    }
}
