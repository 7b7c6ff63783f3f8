//! Permutation-type groups, solved by sorting.

use crate::error::{check_finite, check_len, Result};
use crate::filter::FilterResult;
use crate::group::{PatchSpec, Witness};

fn check(z: &[f64], x: &[f64]) -> Result<()> {
    check_len(z.len(), x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)
}

/// Indices ordered by descending key; equal keys keep index order.
fn descending_order(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    idx
}

/// Permutation `sigma` matching the descending order of `zk` with that of `xk`.
fn aligning_permutation(zk: &[f64], xk: &[f64]) -> Vec<usize> {
    let iz = descending_order(zk);
    let ix = descending_order(xk);
    let mut sigma = vec![0; zk.len()];
    for (a, b) in iz.into_iter().zip(ix) {
        sigma[a] = b;
    }
    sigma
}

fn sign(v: f64) -> i8 {
    if v < 0.0 {
        -1
    } else {
        1
    }
}

/// `max_{P} <z, P x>` over all coordinate permutations, attained by
/// pairing the descending orders of `z` and `x`.
pub fn mf_sort_permutation(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    check(z, x)?;
    let sigma = aligning_permutation(z, x);
    let value = z.iter().zip(&sigma).map(|(zi, &p)| zi * x[p]).sum();
    Ok(FilterResult::exact(value, vec![Witness::Permutation(sigma)]))
}

/// Signed permutations: `<sort|z|, sort|x|>`. With `z = e_1` this is the
/// infinity norm of `x`.
pub fn mf_signed_permutation(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    check(z, x)?;
    let az: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let perm = aligning_permutation(&az, &ax);
    let signs: Vec<i8> = perm.iter().enumerate().map(|(i, &p)| sign(z[i]) * sign(x[p])).collect();
    let value = az.iter().zip(&perm).map(|(a, &p)| a * ax[p]).sum();
    Ok(FilterResult::exact(value, vec![Witness::SignedPermutation { perm, signs }]))
}

/// Coordinate sign flips: `sum |z_i| |x_i|`. With `z` all ones this is the
/// 1-norm of `x`.
pub fn mf_sign_flips(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    check(z, x)?;
    let value = z.iter().zip(x).map(|(a, b)| a.abs() * b.abs()).sum();
    let signs = z.iter().zip(x).map(|(&a, &b)| sign(a) * sign(b)).collect();
    let perm = (0..z.len()).collect();
    Ok(FilterResult::exact(value, vec![Witness::SignedPermutation { perm, signs }]))
}

/// Patch-preserving permutations: sorting is done independently per patch.
pub fn mf_patch_permutation(z: &[f64], x: &[f64], spec: &PatchSpec) -> Result<FilterResult> {
    check(z, x)?;
    check_len(spec.len(), z.len())?;
    let mut sigma: Vec<usize> = (0..z.len()).collect();
    for patch in spec.patches() {
        let zp: Vec<f64> = patch.iter().map(|&i| z[i]).collect();
        let xp: Vec<f64> = patch.iter().map(|&i| x[i]).collect();
        for (a, b) in aligning_permutation(&zp, &xp).into_iter().enumerate() {
            sigma[patch[a]] = patch[b];
        }
    }
    let value = z.iter().zip(&sigma).map(|(zi, &p)| zi * x[p]).sum();
    Ok(FilterResult::exact(value, vec![Witness::Permutation(sigma)]))
}
