//! Circular shifts of whole slices in a windowed tensor.

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::{argmax_within, tie_tolerance, FilterResult};
use crate::group::Witness;
use crate::groups::WindowedTensor;
use crate::linalg;

/// `<z, T_s x>` for every slice shift `s`, where `T_s x` has slice `a` equal
/// to slice `a - s` of `x`. Only the nonzero slices of `z` are visited, so a
/// single-slice template costs one pass over `x`.
pub fn window_scores(
    z: &[f64],
    x: &[f64],
    channels: usize,
    width: usize,
    positions: usize,
) -> Result<Vec<f64>> {
    let block = channels * width;
    check_len(block * positions, z.len())?;
    check_len(block * positions, x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)?;
    if positions == 0 {
        return Err(Error::InvalidInput("no window positions".into()));
    }
    fn slice(v: &[f64], a: usize, block: usize) -> &[f64] {
        &v[a * block..(a + 1) * block]
    }
    let support: Vec<usize> = (0..positions)
        .filter(|&a| slice(z, a, block).iter().any(|&v| v != 0.0))
        .collect();
    let scores = (0..positions)
        .map(|s| {
            support
                .iter()
                .map(|&a| linalg::dot(slice(z, a, block), slice(x, (a + positions - s) % positions, block)))
                .sum()
        })
        .collect();
    Ok(scores)
}

pub fn sliding_window_flat(
    z: &[f64],
    x: &[f64],
    channels: usize,
    width: usize,
    positions: usize,
) -> Result<FilterResult> {
    let scores = window_scores(z, x, channels, width, positions)?;
    let (value, idx) = argmax_within(&scores, tie_tolerance(z, x));
    Ok(FilterResult::exact(value, idx.into_iter().map(Witness::Shift).collect()))
}

/// Max filter of a single-slice template against a windowed tensor:
/// the best match of the template slice over all window positions.
pub fn mf_sliding_window(z: &WindowedTensor, x: &WindowedTensor) -> Result<FilterResult> {
    if z.shape() != x.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            z.shape(),
            x.shape()
        )));
    }
    if z.support_slices().len() > 1 {
        return Err(Error::InvalidInput("template must be supported on a single slice".into()));
    }
    let (c, w, t) = z.shape();
    sliding_window_flat(z.as_slice(), x.as_slice(), c, w, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_embedded_slice() {
        let z = WindowedTensor::single_slice(1, 2, 4, 0, &[1.0, 2.0]).unwrap();
        let x = WindowedTensor::new(1, 2, 4, vec![0.0, 0.0, 2.0, -1.0, 1.0, 2.0, -4.0, 2.0]).unwrap();
        let r = mf_sliding_window(&z, &x).unwrap();
        assert_eq!(r.value, 5.0);
        // slice 0 of T_s x is slice -s = 2 of x
        assert_eq!(r.witnesses, vec![Witness::Shift(2)]);
    }

    #[test]
    fn zero_template_and_rejects_multi_slice() {
        let x = WindowedTensor::new(1, 1, 3, vec![1.0, -2.0, 3.0]).unwrap();
        let z = WindowedTensor::zeros(1, 1, 3);
        assert_eq!(mf_sliding_window(&z, &x).unwrap().value, 0.0);
        let multi = WindowedTensor::new(1, 1, 3, vec![1.0, 1.0, 0.0]).unwrap();
        assert!(mf_sliding_window(&multi, &x).is_err());
    }
}
