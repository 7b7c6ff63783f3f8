//! Small dense helpers on flat slices.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Row-major `rows x cols` matrix times vector.
pub fn mat_vec(m: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    (0..rows).map(|r| dot(&m[r * cols..(r + 1) * cols], x)).collect()
}

/// Row-major square product `a * b`.
pub fn mat_mul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += ail * b[l * k + j];
            }
        }
    }
    out
}

pub fn transpose(a: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            out[j * k + i] = a[i * k + j];
        }
    }
    out
}

pub fn identity(k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        out[i * k + i] = 1.0;
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Singular value decomposition of a small square matrix by one-sided Jacobi
/// rotations. Returns `(u, sigma, v)` with `m = u * diag(sigma) * v^T`, all
/// row-major, `u` and `v` orthogonal (columns completed when `m` is singular).
pub fn jacobi_svd(m: &[f64], k: usize) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    const MAX_SWEEPS: usize = 100;
    let mut a = m.to_vec();
    let mut v = identity(k);
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return Some((identity(k), vec![0.0; k], identity(k)));
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..k {
                    let (ap, aq) = (a[i * k + p], a[i * k + q]);
                    alpha += ap * ap;
                    beta += aq * aq;
                    gamma += ap * aq;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let (ap, aq) = (a[i * k + p], a[i * k + q]);
                    a[i * k + p] = c * ap - s * aq;
                    a[i * k + q] = s * ap + c * aq;
                    let (vp, vq) = (v[i * k + p], v[i * k + q]);
                    v[i * k + p] = c * vp - s * vq;
                    v[i * k + q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    let mut sigma = vec![0.0; k];
    let mut u = vec![0.0; k * k];
    let mut have = vec![false; k];
    for j in 0..k {
        let s: f64 = (0..k).map(|i| a[i * k + j] * a[i * k + j]).sum::<f64>().sqrt();
        sigma[j] = s;
        if s > 1e-14 * scale {
            for i in 0..k {
                u[i * k + j] = a[i * k + j] / s;
            }
            have[j] = true;
        }
    }
    // Complete the missing left singular vectors by Gram-Schmidt on e_i.
    for j in 0..k {
        if have[j] {
            continue;
        }
        for cand in 0..k {
            let mut col = vec![0.0; k];
            col[cand] = 1.0;
            for (jj, &h) in have.iter().enumerate() {
                if !h {
                    continue;
                }
                let proj: f64 = (0..k).map(|i| u[i * k + jj] * col[i]).sum();
                for i in 0..k {
                    col[i] -= proj * u[i * k + jj];
                }
            }
            let n = norm(&col);
            if n > 1e-6 {
                for i in 0..k {
                    u[i * k + j] = col[i] / n;
                }
                have[j] = true;
                break;
            }
        }
    }
    Some((u, sigma, v))
}
