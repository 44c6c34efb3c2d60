//! Low-discrepancy point sets for moderate-dimensional time-box integrals.
//!
//! Uses the additive Kronecker recurrence built on the generalised golden
//! ratio (the root of x^{d+1} = x + 1), with independent random shifts so a
//! standard error can be attached to quasi-Monte Carlo estimates.

/// Generator for the shifted rank-1 Kronecker sequence in `dim` dimensions.
pub struct RSequence {
    alphas: Vec<f64>,
    shift: Vec<f64>,
    state: Vec<f64>,
}

impl RSequence {
    pub fn new(dim: usize, shift: Vec<f64>) -> Self {
        assert_eq!(shift.len(), dim);
        let phi = generalized_golden(dim);
        let mut alphas = Vec::with_capacity(dim);
        let mut a = 1.0;
        for _ in 0..dim {
            a /= phi;
            alphas.push(a);
        }
        Self {
            alphas,
            state: shift.clone(),
            shift,
        }
    }

    /// Restart the sequence at its shift.
    pub fn reset(&mut self) {
        self.state.copy_from_slice(&self.shift);
    }

    /// Next point in [0,1)^dim.
    pub fn next_point(&mut self, out: &mut [f64]) {
        for (i, x) in self.state.iter_mut().enumerate() {
            *x += self.alphas[i];
            if *x >= 1.0 {
                *x -= 1.0;
            }
            out[i] = *x;
        }
    }
}

/// Root of x^{d+1} = x + 1 via Newton iteration.
fn generalized_golden(d: usize) -> f64 {
    let p = (d + 1) as f64;
    let mut x = 2.0f64;
    for _ in 0..64 {
        let fx = x.powf(p) - x - 1.0;
        let dfx = p * x.powf(p - 1.0) - 1.0;
        let next = x - fx / dfx;
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_special_case() {
        assert!((generalized_golden(1) - 1.618_033_988_749_894_8).abs() < 1e-12);
    }

    #[test]
    fn integrates_smooth_function() {
        // int over [0,1]^2 of x*y = 1/4
        let mut seq = RSequence::new(2, vec![0.5, 0.25]);
        let mut pt = [0.0; 2];
        let n = 1 << 14;
        let mut acc = 0.0;
        for _ in 0..n {
            seq.next_point(&mut pt);
            acc += pt[0] * pt[1];
        }
        assert!((acc / n as f64 - 0.25).abs() < 1e-3);
    }
}
