//! Circular translations via FFT cross-correlation.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::{argmax_within, tie_tolerance, FilterResult};
use crate::group::Witness;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Cached forward/inverse transforms of one length.
#[derive(Clone)]
pub struct CyclicCorrelator {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CyclicCorrelator {
    pub fn new(n: usize) -> Self {
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        });
        CyclicCorrelator { n, forward, inverse }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spectrum(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.n as f64;
        spec.iter_mut().for_each(|c| *c *= scale);
        spec
    }

    /// `c[s] = sum_i z[i] x[i - s]` for every shift `s`.
    pub fn correlate(&self, z: &[f64], x: &[f64]) -> Vec<f64> {
        let to_c = |v: &[f64]| v.iter().map(|&r| Complex64::new(r, 0.0)).collect::<Vec<_>>();
        let zs = self.spectrum(&to_c(z));
        let xs = self.spectrum(&to_c(x));
        let prod = zs.iter().zip(&xs).map(|(a, b)| a * b.conj()).collect();
        self.inverse(prod).into_iter().map(|c| c.re).collect()
    }
}

/// Naive `O(n^2)` circular cross-correlation.
pub fn correlate_naive(z: &[f64], x: &[f64]) -> Vec<f64> {
    let n = z.len();
    (0..n)
        .map(|s| (0..n).map(|i| z[i] * x[(i + n - s) % n]).sum())
        .collect()
}

/// Max filter under the cyclic group `C_n`. Witnesses are the maximizing
/// shifts `s`, with `(T_s x)[i] = x[i - s]`.
pub fn mf_cyclic(z: &[f64], x: &[f64], use_fft: bool) -> Result<FilterResult> {
    check_len(z.len(), x.len())?;
    if z.is_empty() {
        return Err(Error::InvalidInput("empty signal".into()));
    }
    check_finite("template", z)?;
    check_finite("signal", x)?;
    let corr = if use_fft {
        CyclicCorrelator::new(z.len()).correlate(z, x)
    } else {
        correlate_naive(z, x)
    };
    let (value, shifts) = argmax_within(&corr, tie_tolerance(z, x));
    Ok(FilterResult::exact(value, shifts.into_iter().map(Witness::Shift).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use std::f64::consts::PI;

    #[test]
    fn shift_example() {
        let r = mf_cyclic(&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 7.0], true).unwrap();
        assert!((r.value - 7.0).abs() < 1e-12);
        assert_eq!(r.witnesses, vec![Witness::Shift(1)]);
    }

    #[test]
    fn self_value_includes_zero_shift() {
        let x = [0.3, -1.2, 2.0, 0.7, 0.1];
        let r = mf_cyclic(&x, &x, true).unwrap();
        assert!((r.value - linalg::norm_sq(&x)).abs() < 1e-12);
        assert!(r.witnesses.contains(&Witness::Shift(0)));
    }

    #[test]
    fn cosine_template_recovers_dft_magnitude() {
        // Oracle: direct O(n^2) DFT of x at frequency k.
        let n = 12;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 5) as f64 - 1.7).collect();
        for k in 1..n / 2 {
            let z: Vec<f64> = (0..n).map(|i| (2.0 * PI * (k * i) as f64 / n as f64).cos()).collect();
            let (re, im) = (0..n).fold((0.0, 0.0), |(re, im), i| {
                let t = -2.0 * PI * (k * i) as f64 / n as f64;
                (re + x[i] * t.cos(), im + x[i] * t.sin())
            });
            let dft = (re * re + im * im).sqrt();
            // Shifts only sample the phase at multiples of 2 pi k / n, so the
            // identity is exact when those hit the optimum; compare against the
            // discrete maximum of Re(e^{i phi} X_k) over reachable phases.
            let reach = (0..n)
                .map(|s| {
                    let phi = 2.0 * PI * (k * s) as f64 / n as f64;
                    re * phi.cos() - im * phi.sin()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let r = mf_cyclic(&z, &x, true).unwrap();
            assert!((r.value - reach).abs() < 1e-9);
            assert!(r.value <= dft + 1e-9);
        }
    }
}
