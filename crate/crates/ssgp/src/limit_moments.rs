//! Exact moment formula for increments of the mixed limit W(L_t(λ)), its
//! Gamma-function upper bound, direct simulation of the limit mixture, and a
//! moment-determinacy criterion for the limiting law.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::functionals::local_time_estimate;
use crate::process_models::ProcessSpec;
use crate::qmc::RSequence;
use crate::rng::stream_rng;
use crate::simulate::PathSampler;
use crate::{Error, Result};

/// Number of independent randomized shifts behind each quasi-random estimate.
const N_SHIFTS: usize = 3;

/// RNG stream offset for the Brownian draws of the mixture sampler, kept
/// clear of the path-coordinate streams `replica * d + c`.
const MIXTURE_STREAM_BASE: u64 = 1 << 40;

/// A product-moment query over disjoint time intervals.
#[derive(Debug, Clone)]
pub struct MomentQuery {
    /// Disjoint half-open intervals (a_i, b_i], ordered with b_i ≤ a_{i+1}.
    pub intervals: Vec<(f64, f64)>,
    /// Exponent m_i ≥ 1 applied to the i-th increment.
    pub m_vec: Vec<usize>,
    /// Spatial level of the local time, in R^d.
    pub lambda: Vec<f64>,
    pub spec: ProcessSpec,
    /// Limiting variance constant scaling the mixture.
    pub c: f64,
}

impl MomentQuery {
    pub fn new(
        intervals: Vec<(f64, f64)>,
        m_vec: Vec<usize>,
        lambda: Vec<f64>,
        spec: ProcessSpec,
        c: f64,
    ) -> Result<Self> {
        if intervals.is_empty() || intervals.len() != m_vec.len() {
            return Err(Error::Domain(
                "need one exponent per interval, at least one interval".into(),
            ));
        }
        let mut prev_b = 0.0;
        for &(a, b) in &intervals {
            if !(a >= 0.0 && b > a) || a < prev_b {
                return Err(Error::Domain(
                    "intervals must be ordered, disjoint, with positive length".into(),
                ));
            }
            prev_b = b;
        }
        if m_vec.iter().any(|&m| m == 0) {
            return Err(Error::Domain("exponents must be at least 1".into()));
        }
        if lambda.len() != spec.dimension {
            return Err(Error::Domain("lambda dimension mismatch".into()));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Domain("C must be finite and nonnegative".into()));
        }
        Ok(Self {
            intervals,
            m_vec,
            lambda,
            spec,
            c,
        })
    }

    pub fn total_order(&self) -> usize {
        self.m_vec.iter().sum()
    }
}

/// Quasi-random moment value with a shift-based standard error.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub value: f64,
    pub se: f64,
    /// Quadrature points dropped because K(u) was numerically degenerate.
    pub skipped: usize,
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Cholesky of K with the one-shot diagonal boost used by the path sampler.
fn cholesky_lenient(k: &DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(ch) = Cholesky::new(k.clone()) {
        return Some(ch);
    }
    let delta = 1e-10 * k.trace() / k.nrows() as f64;
    let mut boosted = k.clone();
    for i in 0..k.nrows() {
        boosted[(i, i)] += delta;
    }
    Cholesky::new(boosted)
}

/// E Π_i [W(L_{b_i}) − W(L_{a_i})]^{m_i} for the C-scaled mixture: zero when
/// any m_i is odd, otherwise the coefficient product times the time-box
/// integral of (2π)^{qd/2} det K(u)^{−d/2} exp(−(|λ|²/2)·1ᵀK(u)⁻¹1), with
/// q = |m|/2 and K(u) the covariance matrix of the process at the q times.
/// The spatial integral of the moment formula is evaluated in closed form;
/// the time integral uses `points` quasi-random nodes per randomized shift.
pub fn limit_moment(q: &MomentQuery, points: usize, seed: u64) -> Result<MomentEstimate> {
    if points == 0 {
        return Err(Error::Domain("need at least one quadrature point".into()));
    }
    if q.m_vec.iter().any(|&m| m % 2 == 1) {
        return Ok(MomentEstimate {
            value: 0.0,
            se: 0.0,
            skipped: 0,
        });
    }
    let d = q.spec.dimension;
    let dim: usize = q.m_vec.iter().map(|&m| m / 2).sum();
    let lam_sq: f64 = q.lambda.iter().map(|v| v * v).sum();
    let mut coeff = q.c.powi(dim as i32);
    for &m in &q.m_vec {
        coeff *= factorial(m)
            / (2f64.powi((m / 2) as i32)
                * (2.0 * std::f64::consts::PI).powf(m as f64 * d as f64 / 2.0)
                * factorial(m / 2));
    }
    let mut jacobian = 1.0;
    for (&(a, b), &m) in q.intervals.iter().zip(&q.m_vec) {
        jacobian *= (b - a).powi((m / 2) as i32);
    }
    let front = (2.0 * std::f64::consts::PI).powf(dim as f64 * d as f64 / 2.0);

    let mut skipped = 0usize;
    let mut shift_means = [0.0f64; N_SHIFTS];
    let mut u = vec![0.0f64; dim];
    let mut pt = vec![0.0f64; dim];
    let ones = DVector::from_element(dim, 1.0);
    for (shift_idx, mean) in shift_means.iter_mut().enumerate() {
        let mut rng = stream_rng(seed, MIXTURE_STREAM_BASE + shift_idx as u64);
        let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut seq = RSequence::new(dim, shift);
        let mut acc = 0.0;
        for _ in 0..points {
            seq.next_point(&mut pt);
            let mut c = 0;
            for (&(a, b), &m) in q.intervals.iter().zip(&q.m_vec) {
                for _ in 0..m / 2 {
                    u[c] = a + (b - a) * pt[c];
                    c += 1;
                }
            }
            let mut k = DMatrix::zeros(dim, dim);
            for p in 0..dim {
                for r in 0..=p {
                    let v = q.spec.covariance(u[p], u[r])?;
                    k[(p, r)] = v;
                    k[(r, p)] = v;
                }
            }
            let Some(ch) = cholesky_lenient(&k) else {
                skipped += 1;
                continue;
            };
            let det = ch.determinant();
            if det <= 0.0 {
                skipped += 1;
                continue;
            }
            let quad = ch.solve(&ones).sum();
            acc += front * det.powf(-(d as f64) / 2.0) * (-0.5 * lam_sq * quad).exp();
        }
        *mean = jacobian * acc / points as f64;
    }
    let mean: f64 = shift_means.iter().sum::<f64>() / N_SHIFTS as f64;
    let var: f64 = shift_means.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (N_SHIFTS as f64 - 1.0);
    Ok(MomentEstimate {
        value: coeff * mean,
        se: coeff * (var / N_SHIFTS as f64).sqrt(),
        skipped,
    })
}

/// Gamma-function upper bound on the even product moment:
/// (b_N^{1−Hd} Γ(1−Hd) / (2(2πκ)^{d/2}))^{|m|/2} · Π m_i!/Γ(m_i(1−Hd)/2 + 1).
/// The exponent on b_N is 1−Hd throughout.
pub fn moment_upper_bound(q: &MomentQuery, kappa: f64) -> Result<f64> {
    if q.m_vec.iter().any(|&m| m % 2 == 1) {
        return Err(Error::Domain("bound requires all exponents even".into()));
    }
    if kappa <= 0.0 {
        return Err(Error::Domain("kappa must be positive".into()));
    }
    let d = q.spec.dimension as f64;
    let h = q.spec.h_eff();
    let e = 1.0 - h * d;
    if e <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "bound requires Hd < 1, got Hd = {}",
            h * d
        )));
    }
    let b_n = q.intervals.last().unwrap().1;
    let total = q.total_order() as f64;
    let base = b_n.powf(e) * statrs::function::gamma::gamma(e)
        / (2.0 * (2.0 * std::f64::consts::PI * kappa).powf(d / 2.0));
    let mut prod = q.c.powf(total / 2.0) * base.powf(total / 2.0);
    for &m in &q.m_vec {
        prod *= factorial(m) / statrs::function::gamma::gamma(m as f64 / 2.0 * e + 1.0);
    }
    Ok(prod)
}

// interpolated occupation density when available, kernel estimate otherwise
fn mixture_local_time(
    path: &crate::simulate::GridPath,
    lambda: &[f64],
    level: f64,
    t: f64,
) -> Result<f64> {
    if path.spec.dimension == 1 {
        crate::functionals::interpolated_local_time(path, lambda, t)
    } else {
        local_time_estimate(path, lambda, level, t)
    }
}

/// Grid parameters for the mixture sampler: time discretization of the path
/// and the bandwidth level of the local-time estimate.
#[derive(Debug, Clone, Copy)]
pub struct MixtureGrid {
    pub n_steps: usize,
    pub level: f64,
}

/// Draw `replications` samples of the vector (√C·[W(L_{b_i}) − W(L_{a_i})])_i
/// by sampling a path, estimating the local time at the interval endpoints,
/// and drawing independent centered Gaussians with variances C·ΔL̂.
/// Deterministic per (seed, replica); row r holds replica r.
pub fn sample_limit_mixture(
    spec: ProcessSpec,
    intervals: &[(f64, f64)],
    c: f64,
    lambda: &[f64],
    replications: usize,
    grid: MixtureGrid,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    Ok(
        sample_limit_mixture_directed(spec, intervals, c, lambda, replications, grid, seed)?
            .into_iter()
            .map(|(row, _)| row)
            .collect(),
    )
}

/// Same as [`sample_limit_mixture`], additionally returning the directing
/// local-time value at the last interval endpoint for each replication.
pub fn sample_limit_mixture_directed(
    spec: ProcessSpec,
    intervals: &[(f64, f64)],
    c: f64,
    lambda: &[f64],
    replications: usize,
    grid: MixtureGrid,
    seed: u64,
) -> Result<Vec<(Vec<f64>, f64)>> {
    // reuse the query validation for the interval layout
    let probe = MomentQuery::new(
        intervals.to_vec(),
        vec![2; intervals.len()],
        lambda.to_vec(),
        spec,
        c,
    )?;
    let t_max = probe.intervals.last().unwrap().1;
    let sampler = PathSampler::new(spec, t_max, grid.n_steps)?;
    let mut out = Vec::with_capacity(replications);
    for r in 0..replications {
        let path = sampler.sample(seed, r as u64);
        let mut rng = stream_rng(seed, MIXTURE_STREAM_BASE + r as u64);
        let mut row = Vec::with_capacity(intervals.len());
        let mut l_last = 0.0;
        for &(a, b) in intervals {
            let la = if a == 0.0 {
                0.0
            } else {
                mixture_local_time(&path, lambda, grid.level, a)?
            };
            let lb = mixture_local_time(&path, lambda, grid.level, b)?;
            let z: f64 = rng.sample(StandardNormal);
            row.push((c * (lb - la).max(0.0)).sqrt() * z);
            l_last = lb;
        }
        out.push((row, l_last));
    }
    Ok(out)
}

/// Moment-determinacy audit per component.
#[derive(Debug, Clone)]
pub struct DeterminacyReport {
    /// max over the tail half of the available orders of μ_{2k}^{1/(2k)}/(2k).
    pub r_hat: Vec<f64>,
    /// True when every component's ratio sequence is non-increasing on the
    /// tail half, the sufficient growth condition for a unique law.
    pub determinate: bool,
}

/// Sufficient moment-determinacy criterion: the law of an N-vector is pinned
/// down by its moments when limsup_k μ_{i,2k}^{1/(2k)}/(2k) is finite for
/// each i. `table[i][k-1]` holds μ_{i,k} for k = 1..=2K.
pub fn determinacy_check(table: &[Vec<f64>]) -> DeterminacyReport {
    let mut r_hat = Vec::with_capacity(table.len());
    let mut determinate = !table.is_empty();
    for row in table {
        let kk = row.len() / 2;
        let ratios: Vec<f64> = (1..=kk)
            .map(|k| {
                let mu = row[2 * k - 1];
                if mu > 0.0 {
                    mu.powf(1.0 / (2.0 * k as f64)) / (2.0 * k as f64)
                } else {
                    f64::NAN
                }
            })
            .collect();
        let tail_start = kk / 2;
        let tail = &ratios[tail_start..];
        let r = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        r_hat.push(r);
        let ok = !tail.is_empty()
            && tail.iter().all(|v| v.is_finite())
            && tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
        determinate &= ok;
    }
    DeterminacyReport { r_hat, determinate }
}
