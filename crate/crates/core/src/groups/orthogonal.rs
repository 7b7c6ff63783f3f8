//! The full orthogonal group and orthogonal matrices acting from the left.

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::FilterResult;
use crate::group::Witness;
use crate::groups::MatrixSignal;
use crate::linalg;

/// `O(d)` acting on `R^d`: the value is `|z| |x|`. The witness is the
/// Householder reflection taking `x / |x|` to `z / |z|`.
pub fn mf_orthogonal(z: &[f64], x: &[f64]) -> Result<FilterResult> {
    check_len(z.len(), x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)?;
    let d = z.len();
    let (nz, nx) = (linalg::norm(z), linalg::norm(x));
    let mut matrix = linalg::identity(d);
    if nz > 0.0 && nx > 0.0 {
        let w = linalg::sub(&linalg::scale(x, 1.0 / nx), &linalg::scale(z, 1.0 / nz));
        let nw = linalg::norm(&w);
        if nw > 1e-12 {
            let w = linalg::scale(&w, 1.0 / nw);
            for i in 0..d {
                for j in 0..d {
                    matrix[i * d + j] -= 2.0 * w[i] * w[j];
                }
            }
        }
    }
    Ok(FilterResult::exact(nz * nx, vec![Witness::Orthogonal { dim: d, matrix }]))
}

/// `O(k)` acting on the left of `k x n` matrices (row-major flat storage).
/// The value is the nuclear norm of `X Z^T`; the witness is the orthogonal
/// polar factor `R = V U^T` where `X Z^T = U S V^T`.
pub fn left_orthogonal_flat(z: &[f64], x: &[f64], k: usize, n: usize) -> Result<FilterResult> {
    check_len(k * n, z.len())?;
    check_len(k * n, x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)?;
    let mut m = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            m[a * k + b] = linalg::dot(&x[a * n..(a + 1) * n], &z[b * n..(b + 1) * n]);
        }
    }
    let (u, sigma, v) = linalg::jacobi_svd(&m, k)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let matrix = linalg::mat_mul(&v, &linalg::transpose(&u, k), k);
    Ok(FilterResult::exact(sigma.iter().sum(), vec![Witness::Orthogonal { dim: k, matrix }]))
}

pub fn mf_left_orthogonal(z: &MatrixSignal, x: &MatrixSignal) -> Result<FilterResult> {
    let (k, n) = z.shape();
    if x.shape() != (k, n) {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            z.shape(),
            x.shape()
        )));
    }
    left_orthogonal_flat(z.as_slice(), x.as_slice(), k, n)
}
