//! Unitary actions on `C^n`, stored as interleaved `(re, im)` pairs.

use num_complex::Complex64;

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::{argmax_within, tie_tolerance, FilterResult};
use crate::group::{from_complex, to_complex, Witness};
use crate::groups::{ComplexVector, CyclicCorrelator};

pub(crate) fn unit_phase(s: Complex64) -> Complex64 {
    let m = s.norm();
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        s.conj() / m
    }
}

fn check(z: &[f64], x: &[f64]) -> Result<()> {
    check_len(z.len(), x.len())?;
    if z.len() % 2 != 0 {
        return Err(Error::InvalidInput("odd length for interleaved complex data".into()));
    }
    check_finite("template", z)?;
    check_finite("signal", x)
}

/// Global phase `c x`, `|c| = 1`: the value is `|z^* x|`.
pub fn phase_flat(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    check(z, x)?;
    let s: Complex64 = to_complex(z).iter().zip(to_complex(x)).map(|(a, b)| a.conj() * b).sum();
    Ok(FilterResult::exact(s.norm(), vec![Witness::Phase(unit_phase(s))]))
}

pub fn mf_phase(z: &ComplexVector, x: &ComplexVector) -> Result<FilterResult> {
    phase_flat(&z.to_real(), &x.to_real())
}

/// `u[a] = sum_i conj(z_i) y_{i-a}` for all circular shifts `a`.
fn shifted_products(corr: &CyclicCorrelator, zs: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let fz = corr.spectrum(&zs.iter().map(|c| c.conj()).collect::<Vec<_>>());
    let fy = corr.spectrum(&y.iter().map(|c| c.conj()).collect::<Vec<_>>());
    corr.inverse(fz.iter().zip(&fy).map(|(a, b)| a * b.conj()).collect())
}

/// Shifts, conjugation and global phase, i.e. `O(2) x C_n` acting on closed
/// planar curves: `max over a, flag of |z^* T_a y|` with `y` in `{x, conj x}`.
pub fn shift_conjugate_flat(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    let all = shift_conjugate_candidates(z, x)?;
    let scores: Vec<f64> = all.iter().map(|t| t.2.norm()).collect();
    let (value, idx) = argmax_within(&scores, tie_tolerance(z, x));
    let witnesses = idx
        .into_iter()
        .map(|i| {
            let (shift, conjugate, u) = all[i];
            Witness::ShiftConjugate { shift, conjugate, phase: unit_phase(u) }
        })
        .collect();
    Ok(FilterResult::exact(value, witnesses))
}

/// Every `(shift, conjugate, u)` with `u = z^* T_shift y`, `y = x` or `conj x`.
pub fn shift_conjugate_candidates(z: &[f64], x: &[f64]) -> Result<Vec<(usize, bool, Complex64)>> {
    check(z, x)?;
    let zs = to_complex(z);
    let xs = to_complex(x);
    let n = zs.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty signal".into()));
    }
    let corr = CyclicCorrelator::new(n);
    let plain = shifted_products(&corr, &zs, &xs);
    let conj = shifted_products(&corr, &zs, &xs.iter().map(|c| c.conj()).collect::<Vec<_>>());
    let all: Vec<(usize, bool, Complex64)> = plain
        .into_iter()
        .enumerate()
        .map(|(a, u)| (a, false, u))
        .chain(conj.into_iter().enumerate().map(|(a, u)| (a, true, u)))
        .collect();
    Ok(all)
}

pub fn mf_shift_conjugate(z: &ComplexVector, x: &ComplexVector) -> Result<FilterResult> {
    shift_conjugate_flat(&z.to_real(), &x.to_real())
}

/// `c T_a y` as an interleaved vector, for building test orbits.
pub fn shift_conjugate_apply(x: &ComplexVector, shift: usize, conjugate: bool, c: Complex64) -> ComplexVector {
    let n = x.len();
    let out = (0..n)
        .map(|i| {
            let v = x.0[(i + n - shift % n) % n];
            c * if conjugate { v.conj() } else { v }
        })
        .collect::<Vec<_>>();
    ComplexVector::from_real(&from_complex(&out)).expect("even length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupAction;
    use crate::linalg;

    fn cv(v: &[(f64, f64)]) -> ComplexVector {
        ComplexVector::new(v.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    #[test]
    fn phase_examples() {
        let r = mf_phase(&cv(&[(1.0, 0.0), (0.0, 0.0)]), &cv(&[(0.0, 1.0), (0.0, 0.0)])).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.witnesses, vec![Witness::Phase(Complex64::new(0.0, -1.0))]);
        let r = mf_phase(&cv(&[(1.0, 2.0)]), &cv(&[(0.0, 0.0)])).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn orbit_mates_reach_norm() {
        let z = cv(&[(1.0, 0.5), (-0.3, 2.0), (0.0, -1.0), (0.7, 0.1), (2.0, 0.0)]);
        let c = Complex64::from_polar(1.0, 0.9);
        for conjugate in [false, true] {
            let x = shift_conjugate_apply(&z, 3, conjugate, c);
            let r = mf_shift_conjugate(&z, &x).unwrap();
            assert!((r.value - z.norm_sq()).abs() < 1e-9);
        }
    }

    #[test]
    fn witness_realizes_value() {
        let g = GroupAction::ShiftAndConjugate { n: 4 };
        let z = [1.0, 0.0, 0.5, -1.0, 0.0, 2.0, -0.4, 0.3];
        let x = [0.2, 1.5, -1.0, 0.0, 0.7, 0.7, 2.0, -0.1];
        let r = shift_conjugate_flat(&z, &x).unwrap();
        for w in &r.witnesses {
            let gx = g.apply(w, &x).unwrap();
            assert!((linalg::dot(&z, &gx) - r.value).abs() < 1e-9);
        }
    }
}
