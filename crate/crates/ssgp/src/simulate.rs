//! Exact sampling of process paths on uniform grids.
//!
//! Fractional Brownian motion uses O(N log N) circulant embedding of the
//! fractional Gaussian noise autocovariance; sub- and bi-fractional Brownian
//! motion use a dense Cholesky factor of the grid covariance, computed once
//! and reused across replicas.

use crate::process_models::{Family, ProcessSpec};
use crate::rng::stream_rng;
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::io::Write;
use std::sync::Arc;

/// Maximum grid size for the dense Cholesky route.
pub const CHOLESKY_GRID_CAP: usize = 4096;

/// Relative eigenvalue clipping threshold for the circulant embedding.
/// Negatives below this fraction of the largest eigenvalue are round-off.
pub const EIGENVALUE_CLIP_REL: f64 = 1e-8;

/// A d-dimensional sampled trajectory on a uniform time grid.
/// `values[c][i]` is coordinate `c` at time `i * dt`; `values[c][0] == 0`.
#[derive(Debug, Clone)]
pub struct GridPath {
    pub spec: ProcessSpec,
    pub t_max: f64,
    pub n_steps: usize,
    pub values: Vec<Vec<f64>>,
}

impl GridPath {
    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Write as CSV: one row per time, columns t, X1..Xd.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "t")?;
        for c in 0..self.spec.dimension {
            write!(w, ",X{}", c + 1)?;
        }
        writeln!(w)?;
        let dt = self.dt();
        for i in 0..=self.n_steps {
            write!(w, "{:.17e}", i as f64 * dt)?;
            for col in &self.values {
                write!(w, ",{:.17e}", col[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// fGn autocovariance gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let th = 2.0 * h;
    0.5 * ((k + 1.0).powf(th) - 2.0 * k.powf(th) + (k - 1.0).abs().powf(th))
}

/// Prepared circulant embedding for fractional Gaussian noise with `n`
/// increments of span `dt`.
pub struct FgnSampler {
    n: usize,
    m: usize,
    amp: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnSampler {
    pub fn new(h: f64, n: usize, dt: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&h) || h == 0.0 {
            return Err(Error::Domain(format!("H must be in (0,1), got {h}")));
        }
        if n == 0 {
            return Err(Error::Domain("need at least one increment".into()));
        }
        let n_pad = n.next_power_of_two();
        let m = 2 * n_pad;
        let scale = dt.powf(2.0 * h);
        let mut row: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m];
        for k in 0..=n_pad {
            row[k].re = scale * fgn_autocovariance(h, k);
        }
        for k in 1..n_pad {
            row[m - k].re = row[k].re;
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let max_ev = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min_ev = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_ev < -EIGENVALUE_CLIP_REL * max_ev {
            return Err(Error::EmbeddingFailure {
                deficit: -min_ev / max_ev,
            });
        }
        let m_f = m as f64;
        let amp: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let ev = c.re.max(0.0);
                if k == 0 || k == n_pad {
                    (ev / m_f).sqrt()
                } else {
                    (ev / (2.0 * m_f)).sqrt()
                }
            })
            .collect();
        Ok(Self {
            n,
            m,
            amp,
            fft: planner.plan_fft_forward(m),
        })
    }

    /// All circulant eigenvalues (before clipping), for diagnostics.
    pub fn eigenvalues(h: f64, n: usize, dt: f64) -> Vec<f64> {
        let n_pad = n.next_power_of_two();
        let m = 2 * n_pad;
        let scale = dt.powf(2.0 * h);
        let mut row: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m];
        for k in 0..=n_pad {
            row[k].re = scale * fgn_autocovariance(h, k);
        }
        for k in 1..n_pad {
            row[m - k].re = row[k].re;
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut row);
        row.iter().map(|c| c.re).collect()
    }

    /// One fGn realization of length `n` from the given RNG.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let half = self.m / 2;
        let mut a: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); self.m];
        a[0].re = self.amp[0] * rng.sample::<f64, _>(StandardNormal);
        a[half].re = self.amp[half] * rng.sample::<f64, _>(StandardNormal);
        for k in 1..half {
            let u: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            a[k] = Complex::new(self.amp[k] * u, self.amp[k] * v);
            a[self.m - k] = a[k].conj();
        }
        self.fft.process(&mut a);
        a[..self.n].iter().map(|c| c.re).collect()
    }
}

/// `count` independent fGn realizations; replica `i` uses stream `i`.
pub fn sample_fgn_circulant(
    h: f64,
    n: usize,
    dt: f64,
    seed: u64,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let sampler = FgnSampler::new(h, n, dt)?;
    Ok((0..count)
        .map(|i| sampler.sample(&mut stream_rng(seed, i as u64)))
        .collect())
}

/// Draw one centered Gaussian vector with the given covariance.
/// A diagonal jitter of 1e-10 times the mean diagonal is applied at most
/// once if the plain factorization fails; the flag reports whether it was.
pub fn cholesky_gaussian(cov: &DMatrix<f64>, seed: u64) -> Result<(Vec<f64>, bool)> {
    let (factor, jittered) = cholesky_with_jitter(cov)?;
    let mut rng = stream_rng(seed, 0);
    let z = DVector::from_iterator(
        cov.nrows(),
        (0..cov.nrows()).map(|_| rng.sample::<f64, _>(StandardNormal)),
    );
    Ok(((factor * z).iter().cloned().collect(), jittered))
}

pub(crate) fn cholesky_with_jitter(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, bool)> {
    if let Some(ch) = Cholesky::new(cov.clone()) {
        return Ok((ch.l(), false));
    }
    let delta = 1e-10 * cov.trace() / cov.nrows() as f64;
    let mut boosted = cov.clone();
    for i in 0..cov.nrows() {
        boosted[(i, i)] += delta;
    }
    Cholesky::new(boosted)
        .map(|ch| (ch.l(), true))
        .ok_or_else(|| Error::NotPsd("covariance not PSD after jitter".into()))
}

enum SamplerKind {
    Circulant(FgnSampler),
    Dense {
        factor: DMatrix<f64>,
        jittered: bool,
    },
}

/// Prepared sampler for d-dimensional paths with a reusable factorization.
pub struct PathSampler {
    pub spec: ProcessSpec,
    pub t_max: f64,
    pub n_steps: usize,
    kind: SamplerKind,
}

impl PathSampler {
    pub fn new(spec: ProcessSpec, t_max: f64, n_steps: usize) -> Result<Self> {
        if t_max <= 0.0 || n_steps == 0 {
            return Err(Error::Domain("t_max and n_steps must be positive".into()));
        }
        let dt = t_max / n_steps as f64;
        let kind = match spec.family {
            Family::Fbm { h } => SamplerKind::Circulant(FgnSampler::new(h, n_steps, dt)?),
            _ => {
                if n_steps > CHOLESKY_GRID_CAP {
                    return Err(Error::Domain(format!(
                        "dense sampler capped at N = {CHOLESKY_GRID_CAP}, got {n_steps}"
                    )));
                }
                let mut cov = DMatrix::zeros(n_steps, n_steps);
                for i in 0..n_steps {
                    for j in 0..=i {
                        let v = spec
                            .covariance((i + 1) as f64 * dt, (j + 1) as f64 * dt)
                            .expect("grid times are nonnegative");
                        cov[(i, j)] = v;
                        cov[(j, i)] = v;
                    }
                }
                let (factor, jittered) = cholesky_with_jitter(&cov)?;
                SamplerKind::Dense { factor, jittered }
            }
        };
        Ok(Self {
            spec,
            t_max,
            n_steps,
            kind,
        })
    }

    pub fn jitter_applied(&self) -> bool {
        matches!(self.kind, SamplerKind::Dense { jittered: true, .. })
    }

    /// Deterministic path for (seed, replica): coordinate c draws from
    /// stream `replica * d + c`.
    pub fn sample(&self, seed: u64, replica: u64) -> GridPath {
        let d = self.spec.dimension;
        let values: Vec<Vec<f64>> = (0..d)
            .map(|c| {
                let mut rng = stream_rng(seed, replica * d as u64 + c as u64);
                let mut col = Vec::with_capacity(self.n_steps + 1);
                col.push(0.0);
                match &self.kind {
                    SamplerKind::Circulant(fgn) => {
                        let mut acc = 0.0;
                        for inc in fgn.sample(&mut rng) {
                            acc += inc;
                            col.push(acc);
                        }
                    }
                    SamplerKind::Dense { factor, .. } => {
                        let z = DVector::from_iterator(
                            self.n_steps,
                            (0..self.n_steps).map(|_| rng.sample::<f64, _>(StandardNormal)),
                        );
                        col.extend((factor * z).iter());
                    }
                }
                col
            })
            .collect();
        GridPath {
            spec: self.spec,
            t_max: self.t_max,
            n_steps: self.n_steps,
            values,
        }
    }
}

/// One-shot convenience wrapper around [`PathSampler`].
pub fn sample_path(spec: ProcessSpec, t_max: f64, n_steps: usize, seed: u64) -> Result<GridPath> {
    Ok(PathSampler::new(spec, t_max, n_steps)?.sample(seed, 0))
}
