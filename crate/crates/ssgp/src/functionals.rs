//! Occupation functionals, kernel local-time estimates and the normalized
//! statistics whose limits the experiment harness verifies.
//!
//! The central object is n^{Hd} ∫_0^t f(n^H (X_s - λ)) ds evaluated by the
//! trapezoid rule on the simulation grid. A resolution rule keeps the kernel
//! bandwidth n^{-H} several grid-increment scales wide; pushing n past that
//! bound undersamples level crossings and is rejected.

use crate::simulate::GridPath;
use crate::{Error, Result};

/// Multiple of the one-step increment scale dt^H that the kernel bandwidth
/// n^{-H} must cover.
pub const RESOLUTION_FACTOR: f64 = 8.0;

/// Built-in test functions on R^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// Standard normal density.
    Gauss,
    /// x ↦ x_1 · gauss(x); odd, zero total mass.
    XGauss,
    /// Normalized indicator of [-1, 1]^d.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestFunction {
    pub family: KernelFamily,
    pub dimension: usize,
}

impl TestFunction {
    pub fn new(family: KernelFamily, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(Self { family, dimension })
    }

    /// Moment-class order: the largest β with ∫|f||x|^β < ∞ and, for
    /// β ∈ (1,2], vanishing first moment. Gauss and Box qualify at β = 2,
    /// the odd kernel only at β = 1.
    pub fn beta(&self) -> u32 {
        match self.family {
            KernelFamily::Gauss | KernelFamily::Box => 2,
            KernelFamily::XGauss => 1,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        match self.family {
            KernelFamily::Gauss => gauss_density(x),
            KernelFamily::XGauss => x[0] * gauss_density(x),
            KernelFamily::Box => {
                if x.iter().all(|&v| (-1.0..=1.0).contains(&v)) {
                    0.5f64.powi(self.dimension as i32)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self.family {
            KernelFamily::Gauss | KernelFamily::Box => 1.0,
            KernelFamily::XGauss => 0.0,
        }
    }

    /// ∫ x f(x) dx.
    pub fn first_moment(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dimension];
        if self.family == KernelFamily::XGauss {
            m[0] = 1.0;
        }
        m
    }

    /// ∫ x xᵀ f(x) dx, row-major.
    pub fn second_moment(&self) -> Vec<Vec<f64>> {
        let d = self.dimension;
        let mut m = vec![vec![0.0; d]; d];
        let diag = match self.family {
            KernelFamily::Gauss => 1.0,
            KernelFamily::Box => 1.0 / 3.0,
            KernelFamily::XGauss => 0.0,
        };
        for i in 0..d {
            m[i][i] = diag;
        }
        m
    }
}

fn gauss_density(x: &[f64]) -> f64 {
    let q: f64 = x.iter().map(|v| v * v).sum();
    (-(q / 2.0)).exp() / (2.0 * std::f64::consts::PI).powf(x.len() as f64 / 2.0)
}

/// Largest scale n admissible on this grid: n^{-H} ≥ RESOLUTION_FACTOR · dt^H.
pub fn max_admissible_n(path: &GridPath) -> f64 {
    let h = path.spec.h_eff();
    RESOLUTION_FACTOR.powf(-1.0 / h) / path.dt()
}

fn check_resolution(path: &GridPath, n: f64) -> Result<()> {
    let max_n = max_admissible_n(path);
    if n > max_n {
        return Err(Error::Resolution { n, max_n });
    }
    Ok(())
}

/// n^{Hd} ∫_0^t f(n^H (X_s - λ)) ds by the trapezoid rule on the grid.
pub fn occupation_functional(
    path: &GridPath,
    f: &TestFunction,
    lambda: &[f64],
    n: f64,
    t: f64,
) -> Result<f64> {
    let d = path.spec.dimension;
    if f.dimension != d || lambda.len() != d {
        return Err(Error::Domain(
            "test function, level and path dimensions must agree".into(),
        ));
    }
    if n <= 0.0 {
        return Err(Error::Domain("scale n must be positive".into()));
    }
    if t < 0.0 || t > path.t_max * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "t = {t} outside path horizon [0, {}]",
            path.t_max
        )));
    }
    check_resolution(path, n)?;
    let h = path.spec.h_eff();
    let dt = path.dt();
    let steps = ((t / dt).round() as usize).min(path.n_steps);
    let scale = n.powf(h);
    let mut x = vec![0.0; d];
    let mut eval_at = |i: usize| -> f64 {
        for c in 0..d {
            x[c] = scale * (path.values[c][i] - lambda[c]);
        }
        f.eval(&x)
    };
    let mut acc = 0.5 * (eval_at(0) + eval_at(steps));
    for i in 1..steps {
        acc += eval_at(i);
    }
    Ok(n.powf(h * d as f64) * acc * dt)
}

/// Kernel local-time estimate L̂_t(λ): the occupation functional with the
/// unit-mass Gaussian kernel. Nonnegative and nondecreasing in t.
pub fn local_time_estimate(path: &GridPath, lambda: &[f64], n: f64, t: f64) -> Result<f64> {
    let f = TestFunction::new(KernelFamily::Gauss, path.spec.dimension)?;
    occupation_functional(path, &f, lambda, n, t)
}

/// Half-width of the level window of `interpolated_local_time`, as a
/// multiple of the one-step displacement scale dt^H.
pub const INTERP_WINDOW_FACTOR: f64 = 1.0;

/// Occupation density of the linearly interpolated path near level λ (d = 1
/// only): the interpolant's occupation measure of the window
/// [λ−w, λ+w] divided by 2w, accumulated segment by segment in closed form.
/// Because the level integral is exact rather than a Riemann sum in time,
/// the window can sit at the one-step displacement scale w = dt^H — far
/// below any admissible kernel bandwidth — so the estimate's error is pure
/// grid-frequency discretization. That makes it the best stand-in for the
/// true local time when centering the normalized statistics: a kernel
/// estimate at a coarser scale m carries an m^{-(1-Hd)/2}-size fluctuation
/// that is correlated with the statistic itself and distorts its variance.
/// The window (rather than the raw crossing sum Σ dt/|ΔX|) keeps per-segment
/// contributions bounded by dt/(2w); the raw sum has heavy tails from
/// segments that barely graze the level.
pub fn interpolated_local_time(path: &GridPath, lambda: &[f64], t: f64) -> Result<f64> {
    if path.spec.dimension != 1 {
        return Err(Error::Domain(
            "interpolated local time requires d = 1".into(),
        ));
    }
    if lambda.len() != 1 {
        return Err(Error::Domain("level must be one-dimensional".into()));
    }
    if t < 0.0 || t > path.t_max * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "t = {t} outside path horizon [0, {}]",
            path.t_max
        )));
    }
    let dt = path.dt();
    let h = path.spec.h_eff();
    let w = INTERP_WINDOW_FACTOR * dt.powf(h);
    let (win_lo, win_hi) = (lambda[0] - w, lambda[0] + w);
    let xs = &path.values[0];
    let mut acc = 0.0;
    for i in 0..path.n_steps {
        let start = i as f64 * dt;
        if start >= t {
            break;
        }
        let (a, b) = (xs[i], xs[i + 1]);
        // partial final step: the interpolant only reaches a + frac·(b−a),
        // at the same dt/|Δ| time per unit level
        let frac = ((t - start) / dt).min(1.0);
        let reach = a + frac * (b - a);
        let (lo, hi) = if a < reach { (a, reach) } else { (reach, a) };
        let overlap = hi.min(win_hi) - lo.max(win_lo);
        if overlap <= 0.0 {
            continue;
        }
        if b == a {
            acc += frac * dt; // flat segment inside the window
        } else {
            acc += dt * overlap / (b - a).abs();
        }
    }
    Ok(acc / (2.0 * w))
}

/// Best available surrogate for the true local time L_t(λ) used to center
/// the normalized statistics: the interpolated occupation density in one
/// dimension, otherwise the kernel estimate at the finest admissible scale.
pub fn reference_local_time(path: &GridPath, lambda: &[f64], t: f64) -> Result<f64> {
    if path.spec.dimension == 1 {
        interpolated_local_time(path, lambda, t)
    } else {
        local_time_estimate(path, lambda, max_admissible_n(path), t)
    }
}

/// Normalization regime of the central limit statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationRegime {
    /// H > 1/(2β+d): plain n^{(Hd+1)/2}.
    Super,
    /// H = 1/(2β+d): extra (ln n)^{-1/2}.
    Critical,
}

#[derive(Debug, Clone)]
pub struct FnStatistic {
    pub n: f64,
    pub lambda: Vec<f64>,
    pub t_list: Vec<f64>,
    pub values: Vec<f64>,
    pub regime: NormalizationRegime,
}

/// Classify (H, β, d) against the threshold 1/(2β+d).
pub fn classify_regime(h: f64, beta: u32, d: usize) -> Result<NormalizationRegime> {
    let threshold = 1.0 / (2.0 * beta as f64 + d as f64);
    if (h - threshold).abs() < 1e-9 {
        Ok(NormalizationRegime::Critical)
    } else if h > threshold {
        Ok(NormalizationRegime::Super)
    } else {
        Err(Error::Regime(format!(
            "H = {h} below threshold 1/(2β+d) = {threshold}; use the degenerate statistic"
        )))
    }
}

/// ℓ · (∫_0^t f(n^H(X_s-λ)) ds − n^{-Hd} L̂_t(λ) ∫f) with the reference
/// local time from `reference_local_time`.
pub fn f_n_statistic(
    path: &GridPath,
    f: &TestFunction,
    lambda: &[f64],
    n: f64,
    t_list: &[f64],
) -> Result<FnStatistic> {
    let h = path.spec.h_eff();
    let d = path.spec.dimension;
    let regime = classify_regime(h, f.beta(), d)?;
    let hd = h * d as f64;
    let ell = match regime {
        NormalizationRegime::Super => n.powf((hd + 1.0) / 2.0),
        NormalizationRegime::Critical => n.powf((hd + 1.0) / 2.0) / n.ln().sqrt(),
    };
    let mass = f.total_mass();
    let mut values = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let occ = occupation_functional(path, f, lambda, n, t)?;
        let centering = if mass == 0.0 {
            0.0
        } else {
            reference_local_time(path, lambda, t)? * mass
        };
        values.push(ell * n.powf(-hd) * (occ - centering));
    }
    Ok(FnStatistic {
        n,
        lambda: lambda.to_vec(),
        t_list: t_list.to_vec(),
        values,
        regime,
    })
}

/// Central difference (L̂_t(λ+δu) − L̂_t(λ−δu)) / (2δ) along the unit
/// direction u.
pub fn local_time_derivative(
    path: &GridPath,
    lambda: &[f64],
    n: f64,
    t: f64,
    direction: &[f64],
    delta: f64,
) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::Domain("derivative step must be positive".into()));
    }
    let h = path.spec.h_eff();
    // differences far below the kernel bandwidth sink into roundoff
    if delta < n.powf(-h) * 1e-3 {
        let max_n = max_admissible_n(path);
        return Err(Error::Resolution { n, max_n });
    }
    let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Domain("direction must be nonzero".into()));
    }
    let shift = |sign: f64| -> Vec<f64> {
        lambda
            .iter()
            .zip(direction)
            .map(|(&l, &u)| l + sign * delta * u / norm)
            .collect()
    };
    let up = local_time_estimate(path, &shift(1.0), n, t)?;
    let down = local_time_estimate(path, &shift(-1.0), n, t)?;
    Ok((up - down) / (2.0 * delta))
}

/// Second mixed partial ∂²L̂/∂λ_i∂λ_k by the four-point cross difference.
pub fn local_time_second_derivative(
    path: &GridPath,
    lambda: &[f64],
    n: f64,
    t: f64,
    i: usize,
    k: usize,
    delta: f64,
) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::Domain("derivative step must be positive".into()));
    }
    let d = path.spec.dimension;
    if i >= d || k >= d {
        return Err(Error::Domain("axis index out of range".into()));
    }
    let h = path.spec.h_eff();
    if delta < n.powf(-h) * 1e-3 {
        let max_n = max_admissible_n(path);
        return Err(Error::Resolution { n, max_n });
    }
    let shifted = |si: f64, sk: f64| -> Vec<f64> {
        let mut l = lambda.to_vec();
        l[i] += si * delta;
        l[k] += sk * delta;
        l
    };
    let pp = local_time_estimate(path, &shifted(1.0, 1.0), n, t)?;
    let pm = local_time_estimate(path, &shifted(1.0, -1.0), n, t)?;
    let mp = local_time_estimate(path, &shifted(-1.0, 1.0), n, t)?;
    let mm = local_time_estimate(path, &shifted(-1.0, -1.0), n, t)?;
    Ok((pp - pm - mp + mm) / (4.0 * delta * delta))
}

#[derive(Debug, Clone, Copy)]
pub struct DegeneratePair {
    pub lhs: f64,
    pub rhs: f64,
}

/// The degenerate-regime statistic (H < 1/(2β+d), one dimension):
/// lhs = n^{Hβ}(n^H ∫_0^t f(n^H(X_s-λ)) ds − L̂_t(λ) ∫f), rhs matching it
/// through local-time derivative estimates.
pub fn theorem3_statistic(
    path: &GridPath,
    f: &TestFunction,
    lambda: &[f64],
    n: f64,
    t: f64,
) -> Result<DegeneratePair> {
    let d = path.spec.dimension;
    if d != 1 {
        return Err(Error::Domain(
            "degenerate-regime statistic supports d = 1 only".into(),
        ));
    }
    let h = path.spec.h_eff();
    let beta = f.beta();
    let threshold = 1.0 / (2.0 * beta as f64 + 1.0);
    if h >= threshold - 1e-12 {
        return Err(Error::Regime(format!(
            "H = {h} not below 1/(2β+d) = {threshold}"
        )));
    }
    let n_ref = max_admissible_n(path);
    let occ = occupation_functional(path, f, lambda, n, t)?;
    let centering = if f.total_mass() == 0.0 {
        0.0
    } else {
        reference_local_time(path, lambda, t)? * f.total_mass()
    };
    let lhs = n.powf(h * beta as f64) * (occ - centering);
    // the rhs is the limit target: the local-time derivative estimated at
    // the finest admissible kernel scale, with the finite-difference
    // bandwidth matched to that scale. The lhs smooths the local time over
    // the window n^{-H}, which shrinks toward the rhs window as n grows, so
    // the squared gap decays across the sweep.
    let delta = n_ref.powf(-h);
    let rhs = match beta {
        1 => {
            let deriv = local_time_derivative(path, lambda, n_ref, t, &[1.0], delta)?;
            deriv * f.first_moment()[0]
        }
        2 => {
            let second = local_time_second_derivative(path, lambda, n_ref, t, 0, 0, delta)?;
            0.5 * f.second_moment()[0][0] * second
        }
        _ => unreachable!("builtin kernels have β ∈ {{1,2}}"),
    };
    Ok(DegeneratePair { lhs, rhs })
}
