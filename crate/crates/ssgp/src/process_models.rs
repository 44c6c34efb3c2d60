//! Covariance catalog for the three Gaussian process families and numerical
//! verification of the structural hypotheses they are required to satisfy:
//! the increment-variance sandwich (assumption A), the increment-correlation
//! decay (assumption B) and the spectral lower bound behind strong local
//! nondeterminism.
//!
//! All reports are plain data and serialize to CSV via [`crate::harness`].

use crate::quad::oscillatory_cos;
use crate::rng::stream_rng;
use crate::{Error, Result};
use rand::Rng;

/// One of the three built-in process families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Fractional Brownian motion with Hurst index `h`.
    Fbm { h: f64 },
    /// Sub-fractional Brownian motion with index `h`.
    SubFbm { h: f64 },
    /// Bi-fractional Brownian motion with indices `(h0, k0)`.
    BiFbm { h0: f64, k0: f64 },
}

/// A d-dimensional process whose coordinates are independent copies of one
/// of the built-in one-dimensional centered Gaussian processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub family: Family,
    pub dimension: usize,
}

impl ProcessSpec {
    pub fn fbm(h: f64, dimension: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&h) || h == 0.0 {
            return Err(Error::Domain(format!("fbm requires H in (0,1), got {h}")));
        }
        Self::checked(Family::Fbm { h }, dimension)
    }

    pub fn sub_fbm(h: f64, dimension: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&h) || h == 0.0 {
            return Err(Error::Domain(format!(
                "sub_fbm requires H in (0,1), got {h}"
            )));
        }
        Self::checked(Family::SubFbm { h }, dimension)
    }

    pub fn bi_fbm(h0: f64, k0: f64, dimension: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&h0) || h0 == 0.0 {
            return Err(Error::Domain(format!(
                "bi_fbm requires H0 in (0,1), got {h0}"
            )));
        }
        if !(0.0..=1.0).contains(&k0) || k0 == 0.0 {
            return Err(Error::Domain(format!(
                "bi_fbm requires K0 in (0,1], got {k0}"
            )));
        }
        Self::checked(Family::BiFbm { h0, k0 }, dimension)
    }

    fn checked(family: Family, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Ok(Self { family, dimension })
    }

    /// Short human-readable label, e.g. `fbm(H=0.6, d=1)`.
    pub fn describe(&self) -> String {
        match self.family {
            Family::Fbm { h } => format!("fbm(H={h}, d={})", self.dimension),
            Family::SubFbm { h } => format!("sub_fbm(H={h}, d={})", self.dimension),
            Family::BiFbm { h0, k0 } => {
                format!("bi_fbm(H0={h0}, K0={k0}, d={})", self.dimension)
            }
        }
    }

    /// Self-similarity index: H for fBm/sub-fBm, H0*K0 for bi-fBm.
    pub fn h_eff(&self) -> f64 {
        match self.family {
            Family::Fbm { h } | Family::SubFbm { h } => h,
            Family::BiFbm { h0, k0 } => h0 * k0,
        }
    }

    /// Covariance of the one-dimensional component process at times (s, t).
    pub fn covariance(&self, s: f64, t: f64) -> Result<f64> {
        if s < 0.0 || t < 0.0 {
            return Err(Error::Domain(format!(
                "covariance requires nonnegative times, got ({s}, {t})"
            )));
        }
        Ok(match self.family {
            Family::Fbm { h } => {
                0.5 * (t.powf(2.0 * h) + s.powf(2.0 * h) - (t - s).abs().powf(2.0 * h))
            }
            Family::BiFbm { h0, k0 } => {
                let th = 2.0 * h0;
                ((t.powf(th) + s.powf(th)).powf(k0) - (t - s).abs().powf(th * k0))
                    / 2f64.powf(k0)
            }
            Family::SubFbm { h } => {
                let th = 2.0 * h;
                t.powf(th) + s.powf(th) - 0.5 * ((t + s).powf(th) + (t - s).abs().powf(th))
            }
        })
    }

    /// Var(X^1_{t+h} - X^1_t). Closed forms are used where they avoid the
    /// cancellation in assembling the variance from three covariances.
    pub fn increment_variance(&self, t: f64, h: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        if h <= 0.0 {
            return Err(Error::Domain(format!("step must be > 0, got {h}")));
        }
        match self.family {
            // stationary increments
            Family::Fbm { h: hurst } => Ok(h.powf(2.0 * hurst)),
            Family::SubFbm { h: hurst } => {
                let th = 2.0 * hurst;
                Ok(h.powf(th) + (2.0 * t + h).powf(th)
                    - 0.5 * (2.0 * (t + h)).powf(th)
                    - 0.5 * (2.0 * t).powf(th))
            }
            Family::BiFbm { .. } => {
                let v = self.covariance(t + h, t + h)? + self.covariance(t, t)?
                    - 2.0 * self.covariance(t, t + h)?;
                Ok(v.max(0.0))
            }
        }
    }

    /// Covariance of the stationarized process Y_u = e^{-Ht} Z_{e^t}:
    /// r(t) = e^{-Ht} E[Z_1 Z_{e^t}], evaluated in a cancellation-safe form.
    pub fn stationarized_r(&self, t: f64) -> f64 {
        let t = t.abs();
        let x = (-t).exp();
        match self.family {
            Family::Fbm { h } => {
                // e^{Ht}/2 [e^{-2Ht} + (1 - (1-x)^{2H})]
                let one_minus = -(2.0 * h * (-x).ln_1p()).exp_m1();
                0.5 * ((-h * t).exp() + (h * t).exp() * one_minus)
            }
            Family::SubFbm { h } => {
                let a = (2.0 * h * x.ln_1p()).exp_m1();
                let b = (2.0 * h * (-x).ln_1p()).exp_m1();
                // e^{Ht} [e^{-2Ht} - ( (1+x)^{2H} + (1-x)^{2H} - 2 )/2 ]
                (-h * t).exp() - (h * t).exp() * 0.5 * (a + b)
            }
            Family::BiFbm { h0, k0 } => {
                let g = h0 * k0;
                let y = (-2.0 * h0 * t).exp();
                let grow = (k0 * y.ln_1p()).exp_m1();
                let shrink = -(2.0 * h0 * k0 * (-x).ln_1p()).exp_m1();
                (g * t).exp() / 2f64.powf(k0) * (grow + shrink)
            }
        }
    }

    /// Spectral integral of the stationarized covariance:
    /// S(lambda) = int_0^infty r(t) cos(lambda t) dt.
    pub fn spectral_integral(&self, lambda: f64) -> f64 {
        let (t_star, rate) = self.r_truncation();
        let body = oscillatory_cos(&|t| self.stationarized_r(t), lambda, t_star, 1e-12);
        // analytic tail for r(t) ~ A e^{-rate t} beyond t_star
        let lam = lambda.abs();
        let r_star = self.stationarized_r(t_star);
        let tail = r_star * (rate * (lam * t_star).cos() - lam * (lam * t_star).sin())
            / (rate * rate + lam * lam);
        body + tail
    }

    /// Truncation point T* with r(T*) < 1e-14 and the local decay rate there.
    fn r_truncation(&self) -> (f64, f64) {
        let mut t = 10.0;
        while self.stationarized_r(t) > 1e-14 && t < 1500.0 {
            t += 10.0;
        }
        let r0 = self.stationarized_r(t - 1.0);
        let r1 = self.stationarized_r(t);
        let rate = if r1 > 0.0 && r0 > r1 {
            (r0 / r1).ln()
        } else {
            1.0
        };
        (t, rate.max(1e-3))
    }

    /// Shape check of the stationarized covariance on a grid, with an
    /// exponential-extrapolation estimate of the tail mass beyond the grid.
    pub fn check_r_shape(&self, t_grid: &[f64]) -> RShapeReport {
        let vals: Vec<f64> = t_grid.iter().map(|&t| self.stationarized_r(t)).collect();
        let positive = vals.iter().all(|&v| v > 0.0);
        let strictly_decreasing = vals.windows(2).all(|w| w[1] < w[0]);
        let tail = {
            let n = vals.len();
            if n >= 2 && vals[n - 1] > 0.0 && vals[n - 2] > vals[n - 1] {
                let rate = (vals[n - 2] / vals[n - 1]).ln() / (t_grid[n - 1] - t_grid[n - 2]);
                vals[n - 1] / rate
            } else {
                f64::NAN
            }
        };
        RShapeReport {
            positive,
            strictly_decreasing,
            integrable_tail_estimate: tail,
        }
    }

    /// Minimum of S(lambda) (|lambda|+1)^{1+2H} over a lambda grid: a numeric
    /// witness for the spectral lower bound behind strong local
    /// nondeterminism. The noise floor of the quadrature is about 1e-12.
    pub fn check_slnd_spectral(&self, lambda_max: f64, n_points: usize) -> SlndSpectralReport {
        let h = self.h_eff();
        let mut c_hat = f64::INFINITY;
        let mut lambda_at_min = 0.0;
        for i in 0..n_points {
            let lam = lambda_max * i as f64 / (n_points.max(2) - 1) as f64;
            let s = self.spectral_integral(lam);
            let scaled = s * (lam.abs() + 1.0).powf(1.0 + 2.0 * h);
            if scaled < c_hat {
                c_hat = scaled;
                lambda_at_min = lam;
            }
        }
        SlndSpectralReport {
            c_hat,
            lambda_at_min,
            pass: c_hat > 0.0,
        }
    }

    /// Fit the increment-variance sandwich Var(X_{t+h}-X_t) in
    /// [h^{2H}(sigma - phi), h^{2H}(sigma + phi)] over the sampled grids.
    ///
    /// `eps_grid` holds the relative step sizes h/t. The envelope is reported
    /// coarse-to-fine (descending eps) and monotonized by a running maximum
    /// from the fine end, so it is non-increasing along the reported grid and
    /// its last entry is the deviation at the finest scale.
    pub fn check_assumption_a(
        &self,
        t_grid: &[f64],
        eps_grid: &[f64],
        tol: f64,
    ) -> Result<AssumptionAReport> {
        if t_grid.iter().any(|&t| t <= 0.0) || eps_grid.iter().any(|&e| e <= 0.0 || e > 1.0) {
            return Err(Error::Domain(
                "assumption A grids must be positive with eps <= 1".into(),
            ));
        }
        let mut eps_sorted: Vec<f64> = eps_grid.to_vec();
        eps_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let h2 = 2.0 * self.h_eff();

        // normalized increment variances per (eps, t)
        let ratios: Vec<Vec<f64>> = eps_sorted
            .iter()
            .map(|&eps| {
                t_grid
                    .iter()
                    .map(|&t| {
                        let h = eps * t;
                        self.increment_variance(t, h).map(|v| v / h.powf(h2))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        // sigma from the finest stratum, robust to boundary strata
        let mut finest = ratios.last().cloned().unwrap_or_default();
        finest.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sigma_hat = if finest.is_empty() {
            return Err(Error::Domain("empty assumption A grid".into()));
        } else {
            finest[finest.len() / 2]
        };

        let raw: Vec<f64> = ratios
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r| (r - sigma_hat).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        // smallest majorant that is non-increasing toward the fine end
        let mut phi = raw.clone();
        for i in (0..phi.len().saturating_sub(1)).rev() {
            phi[i] = phi[i].max(phi[i + 1]);
        }
        let pass = *phi.last().unwrap() < tol;
        Ok(AssumptionAReport {
            sigma_hat,
            phi_envelope: eps_sorted.into_iter().zip(phi).collect(),
            eta: 1.0 / eps_grid.iter().cloned().fold(0.0, f64::max),
            pass,
        })
    }

    /// Envelope of normalized increment correlations over the three
    /// separation regimes, per eta. Quadruple sampling is stratified over
    /// log-spaced step ratios and deterministic given the seed.
    pub fn check_assumption_b(
        &self,
        eta_grid: &[f64],
        samples_per_regime: usize,
        seed: u64,
        tol: f64,
    ) -> Result<AssumptionBReport> {
        if eta_grid.iter().any(|&e| e <= 1.0) {
            return Err(Error::Domain("eta grid entries must exceed 1".into()));
        }
        let mut etas: Vec<f64> = eta_grid.to_vec();
        etas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut regimes_checked = Vec::new();
        let mut warnings = 0usize;
        let mut raw = vec![0.0f64; etas.len()];
        for (ei, &eta) in etas.iter().enumerate() {
            for regime in [Regime::SmallOverLarge, Regime::LargeOverSmall, Regime::WideGap] {
                let mut rng = stream_rng(seed, (ei * 3 + regime as usize) as u64);
                let mut worst = 0.0f64;
                for _ in 0..samples_per_regime {
                    let log_u = |rng: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64| -> f64 {
                        10f64.powf(rng.random_range(lo..hi))
                    };
                    let t1 = log_u(&mut rng, -2.0, 1.0);
                    let (d2, d3, d4) = match regime {
                        Regime::SmallOverLarge => {
                            let d4 = log_u(&mut rng, -3.0, 1.0);
                            let d2 = d4 / eta * log_u(&mut rng, -3.0, 0.0);
                            (d2, log_u(&mut rng, -3.0, 1.0), d4)
                        }
                        Regime::LargeOverSmall => {
                            let d2 = log_u(&mut rng, -3.0, 1.0);
                            let d4 = d2 / eta * log_u(&mut rng, -3.0, 0.0);
                            (d2, log_u(&mut rng, -3.0, 1.0), d4)
                        }
                        Regime::WideGap => {
                            let d3 = log_u(&mut rng, -3.0, 1.0);
                            let d2 = d3 / eta * log_u(&mut rng, -3.0, 0.0);
                            let d4 = d3 / eta * log_u(&mut rng, -3.0, 0.0);
                            (d2, d3, d4)
                        }
                    };
                    let (t2, t3, t4) = (t1 + d2, t1 + d2 + d3, t1 + d2 + d3 + d4);
                    let v2 = self.increment_variance(t1, d2)?;
                    let v4 = self.increment_variance(t3, d4)?;
                    if v2 <= 0.0 || v4 <= 0.0 {
                        warnings += 1;
                        continue;
                    }
                    let cross = self.covariance(t4, t2)? - self.covariance(t4, t1)?
                        - self.covariance(t3, t2)?
                        + self.covariance(t3, t1)?;
                    let corr = cross.abs() / (v2 * v4).sqrt();
                    worst = worst.max(corr);
                }
                regimes_checked.push(RegimeEnvelope {
                    eta,
                    regime,
                    max_abs_correlation: worst,
                });
                raw[ei] = raw[ei].max(worst);
            }
        }
        // non-increasing majorant toward large eta
        let mut psi = raw.clone();
        for i in (0..psi.len().saturating_sub(1)).rev() {
            psi[i] = psi[i].max(psi[i + 1]);
        }
        let pass = *psi.last().unwrap() < tol;
        Ok(AssumptionBReport {
            psi_envelope: etas.into_iter().zip(psi).collect(),
            regimes_checked,
            warnings,
            pass,
        })
    }
}

/// Increment-correlation regimes of assumption B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// dt2/dt4 <= 1/eta
    SmallOverLarge = 0,
    /// dt2/dt4 >= eta
    LargeOverSmall = 1,
    /// max(dt2, dt4)/dt3 <= 1/eta
    WideGap = 2,
}

#[derive(Debug, Clone)]
pub struct AssumptionAReport {
    pub sigma_hat: f64,
    /// (eps, phi_hat) pairs, eps descending.
    pub phi_envelope: Vec<(f64, f64)>,
    pub eta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct RegimeEnvelope {
    pub eta: f64,
    pub regime: Regime,
    pub max_abs_correlation: f64,
}

#[derive(Debug, Clone)]
pub struct AssumptionBReport {
    /// (eta, psi_hat) pairs, eta ascending, psi non-increasing.
    pub psi_envelope: Vec<(f64, f64)>,
    pub regimes_checked: Vec<RegimeEnvelope>,
    pub warnings: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct RShapeReport {
    pub positive: bool,
    pub strictly_decreasing: bool,
    pub integrable_tail_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SlndSpectralReport {
    pub c_hat: f64,
    pub lambda_at_min: f64,
    pub pass: bool,
}

/// Reference quadrature for the spectral integral: fine fixed trapezoid.
/// Kept independent of [`ProcessSpec::spectral_integral`] so the two routes
/// can be cross-checked in tests.
pub fn spectral_integral_trapezoid(spec: &ProcessSpec, lambda: f64, t_max: f64, n: usize) -> f64 {
    let dt = t_max / n as f64;
    let vals: Vec<f64> = (0..=n)
        .map(|i| {
            let t = i as f64 * dt;
            spec.stationarized_r(t) * (lambda * t).cos()
        })
        .collect();
    crate::quad::trapezoid_uniform(&vals, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brownian_covariance_is_min() {
        let spec = ProcessSpec::fbm(0.5, 1).unwrap();
        assert_relative_eq!(spec.covariance(1.0, 2.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn bi_fbm_k1_equals_fbm() {
        let bi = ProcessSpec::bi_fbm(0.3, 1.0, 1).unwrap();
        let fbm = ProcessSpec::fbm(0.3, 1).unwrap();
        for (s, t) in [(0.2, 1.7), (1.0, 1.0), (0.0, 3.0), (2.5, 0.1)] {
            assert_relative_eq!(
                bi.covariance(s, t).unwrap(),
                fbm.covariance(s, t).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn sub_fbm_diagonal_closed_form() {
        let h = 0.65;
        let spec = ProcessSpec::sub_fbm(h, 1).unwrap();
        for t in [0.3f64, 1.0, 4.2] {
            let expect = (2.0 - 2f64.powf(2.0 * h - 1.0)) * t.powf(2.0 * h);
            assert_relative_eq!(spec.covariance(t, t).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn covariance_rejects_negative_times() {
        let spec = ProcessSpec::fbm(0.5, 1).unwrap();
        assert!(spec.covariance(-1.0, 2.0).is_err());
    }

    #[test]
    fn fbm_increment_variance_stationary() {
        let spec = ProcessSpec::fbm(0.7, 1).unwrap();
        assert_relative_eq!(
            spec.increment_variance(3.0, 0.1).unwrap(),
            0.1f64.powf(1.4),
            epsilon = 1e-15
        );
    }

    #[test]
    fn sub_fbm_increment_variance_matches_covariance_assembly() {
        let spec = ProcessSpec::sub_fbm(0.6, 1).unwrap();
        for (t, h) in [(1.0, 0.5), (0.2, 0.01), (3.0, 1.0)] {
            let direct = spec.increment_variance(t, h).unwrap();
            let assembled = spec.covariance(t + h, t + h).unwrap()
                + spec.covariance(t, t).unwrap()
                - 2.0 * spec.covariance(t, t + h).unwrap();
            assert_relative_eq!(direct, assembled, epsilon = 1e-9);
        }
    }

    #[test]
    fn bi_fbm_small_step_asymptotics() {
        let (h0, k0) = (0.6, 0.8);
        let spec = ProcessSpec::bi_fbm(h0, k0, 1).unwrap();
        let h = 1e-3;
        let v = spec.increment_variance(1.0, h).unwrap();
        let expect = 2f64.powf(1.0 - k0) * h.powf(2.0 * h0 * k0);
        assert!((v / expect - 1.0).abs() < 0.01, "v={v} expect={expect}");
    }

    #[test]
    fn stationarized_r_matches_covariance() {
        // r(t) = e^{-Ht} cov(1, e^t) for each family
        for spec in [
            ProcessSpec::fbm(0.3, 1).unwrap(),
            ProcessSpec::fbm(0.7, 1).unwrap(),
            ProcessSpec::sub_fbm(0.4, 1).unwrap(),
            ProcessSpec::sub_fbm(0.9, 1).unwrap(),
            ProcessSpec::bi_fbm(0.6, 0.8, 1).unwrap(),
        ] {
            let g = spec.h_eff();
            for t in [0.0, 0.5, 2.0, 8.0] {
                let direct = (-g * t).exp() * spec.covariance(1.0, t.exp()).unwrap();
                assert_relative_eq!(spec.stationarized_r(t), direct, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn stationarized_r_at_zero_is_unit_variance() {
        for spec in [
            ProcessSpec::fbm(0.25, 1).unwrap(),
            ProcessSpec::sub_fbm(0.25, 1).unwrap(),
            ProcessSpec::bi_fbm(0.5, 0.5, 1).unwrap(),
        ] {
            assert_relative_eq!(
                spec.stationarized_r(0.0),
                spec.covariance(1.0, 1.0).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn r_shape_all_families() {
        let grid: Vec<f64> = (0..=300).map(|i| i as f64 * 0.1).collect();
        for spec in [
            ProcessSpec::bi_fbm(0.6, 0.8, 1).unwrap(),
            ProcessSpec::sub_fbm(0.3, 1).unwrap(),
            ProcessSpec::sub_fbm(0.9, 1).unwrap(),
        ] {
            let shape = spec.check_r_shape(&grid);
            assert!(shape.positive, "{:?}", spec);
            assert!(shape.strictly_decreasing, "{:?}", spec);
            assert!(shape.integrable_tail_estimate.is_finite());
        }
    }

    #[test]
    fn spectral_integral_positive_at_probes() {
        let spec = ProcessSpec::sub_fbm(0.7, 1).unwrap();
        for lam in [0.0, 1.0, 5.0, 20.0] {
            assert!(spec.spectral_integral(lam) > 0.0, "lam={lam}");
        }
    }

    #[test]
    fn spectral_integral_matches_trapezoid_oracle() {
        let spec = ProcessSpec::fbm(0.5, 1).unwrap();
        for lam in [0.0, 0.7, 4.0] {
            let fast = spec.spectral_integral(lam);
            let slow = spectral_integral_trapezoid(&spec, lam, 200.0, 4_000_000);
            assert!((fast - slow).abs() < 1e-8, "lam={lam} {fast} {slow}");
        }
    }

    #[test]
    fn assumption_a_fbm_exact() {
        let spec = ProcessSpec::fbm(0.35, 1).unwrap();
        let t: Vec<f64> = (1..=8).map(|i| i as f64 * 0.8).collect();
        let eps = [0.05, 0.01, 1e-3, 1e-4];
        let rep = spec.check_assumption_a(&t, &eps, 1e-2).unwrap();
        assert!((rep.sigma_hat - 1.0).abs() < 1e-13);
        assert!(rep.phi_envelope.iter().all(|&(_, p)| p < 1e-12));
        assert!(rep.pass);
    }

    #[test]
    fn assumption_b_brownian_wide_gap_zero() {
        let spec = ProcessSpec::fbm(0.5, 1).unwrap();
        let rep = spec
            .check_assumption_b(&[10.0, 100.0], 500, 42, 0.05)
            .unwrap();
        let wide_gap_max = rep
            .regimes_checked
            .iter()
            .filter(|r| r.regime == Regime::WideGap)
            .map(|r| r.max_abs_correlation)
            .fold(0.0, f64::max);
        // exact zero up to cancellation noise amplified by tiny increments
        assert!(wide_gap_max < 1e-6, "{wide_gap_max}");
        // all regimes are independent increments for Brownian motion
        assert!(rep.pass);
    }
}
