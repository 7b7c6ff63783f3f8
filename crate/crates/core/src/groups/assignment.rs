//! Column permutations of point clouds, solved as a linear assignment.

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::FilterResult;
use crate::group::Witness;
use crate::groups::MatrixSignal;

/// Maximum-profit perfect matching on a square `n x n` profit matrix
/// (row-major). Returns `assign` with row `r` matched to column `assign[r]`.
///
/// Shortest augmenting paths with dual potentials, `O(n^3)`.
pub fn max_weight_assignment(profit: &[f64], n: usize) -> Vec<usize> {
    debug_assert_eq!(profit.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    let cost = |r: usize, c: usize| -profit[(r - 1) * n + (c - 1)];
    // 1-based with a dummy column 0, as in the classical formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// `max_P <Z, X P>` for `k x n` row-major matrices, where `X P` has column
/// `j` equal to column `sigma(j)` of `X`.
pub fn column_permutation_flat(z: &[f64], x: &[f64], k: usize, n: usize) -> Result<FilterResult> {
    check_len(k * n, z.len())?;
    check_len(k * n, x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)?;
    let mut profit = vec![0.0; n * n];
    for j in 0..n {
        for c in 0..n {
            profit[j * n + c] = (0..k).map(|r| z[r * n + j] * x[r * n + c]).sum();
        }
    }
    let sigma = max_weight_assignment(&profit, n);
    let value = (0..k)
        .flat_map(|r| (0..n).map(move |j| (r, j)))
        .map(|(r, j)| z[r * n + j] * x[r * n + sigma[j]])
        .sum();
    Ok(FilterResult::exact(value, vec![Witness::Permutation(sigma)]))
}

pub fn mf_column_permutation(z: &MatrixSignal, x: &MatrixSignal) -> Result<FilterResult> {
    let (k, n) = z.shape();
    if x.shape() != (k, n) {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            z.shape(),
            x.shape()
        )));
    }
    column_permutation_flat(z.as_slice(), x.as_slice(), k, n)
}
