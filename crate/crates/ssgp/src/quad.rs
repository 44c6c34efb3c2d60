//! Small quadrature toolbox: adaptive Simpson panels, oscillatory splitting
//! at cosine zeros and a fixed Gauss-Legendre rule for smooth panels.

/// 8-point Gauss-Legendre nodes/weights on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Fixed 8-point Gauss-Legendre on [a, b].
pub fn gauss8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL8_W[i] * f(c + h * GL8_X[i]);
    }
    acc * h
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_rec(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Integrate `g(t) * cos(lambda * t)` on [0, t_max] by splitting at the
/// zeros of the cosine when the oscillation is faster than the panel scale.
pub fn oscillatory_cos<F: Fn(f64) -> f64>(g: F, lambda: f64, t_max: f64, tol: f64) -> f64 {
    let lam = lambda.abs();
    let integrand = |t: f64| g(t) * (lam * t).cos();
    if lam <= 1.0 {
        return adaptive_simpson(&integrand, 0.0, t_max, tol);
    }
    // zeros of cos(lam t) at t = (k + 1/2) pi / lam
    let half_period = std::f64::consts::PI / lam;
    let mut acc = 0.0;
    let mut a = 0.0;
    let mut k = 0usize;
    let n_panels = (t_max / half_period).ceil() as usize;
    let panel_tol = tol / (n_panels.max(1) as f64);
    loop {
        let b = ((k as f64 + 0.5) * half_period).min(t_max);
        if b > a {
            acc += if b - a < half_period * 1.5 {
                gauss8(&integrand, a, b)
            } else {
                adaptive_simpson(&integrand, a, b, panel_tol)
            };
        }
        if b >= t_max {
            break;
        }
        a = b;
        k += 1;
    }
    acc
}

/// Trapezoid rule over uniformly spaced samples with spacing `dt`.
pub fn trapezoid_uniform(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dt * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_matches_closed_form() {
        // int_0^inf e^{-t} cos(lam t) dt = 1/(1+lam^2)
        for lam in [0.0, 0.5, 3.0, 25.0] {
            let v = oscillatory_cos(&|t: f64| (-t).exp(), lam, 40.0, 1e-12);
            assert!(
                (v - 1.0 / (1.0 + lam * lam)).abs() < 1e-9,
                "lam={lam} v={v}"
            );
        }
    }

    #[test]
    fn trapezoid_linear_exact() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let v = trapezoid_uniform(&xs, 0.1);
        assert!((v - 0.5).abs() < 1e-12);
    }
}
