//! Template generators: random unit vectors, Hermite surrogates for sorted
//! Gaussians, indicator templates, and Gaussian mixture discriminators.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::group::{GroupAction, GroupKind};
use crate::groups::cyclic::mf_cyclic;
use crate::linalg;
use crate::rng::{self, SeededRng};

/// A max filter template. `group_kind`, when set, ties the template to one
/// group family; `support`, when set, lists the only indices allowed to be
/// nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub group_kind: Option<GroupKind>,
    pub vector: Vec<f64>,
    #[serde(default)]
    pub support: Option<Vec<usize>>,
    #[serde(default)]
    pub label: String,
}

impl Template {
    pub fn new(vector: Vec<f64>, label: impl Into<String>) -> Self {
        Template { group_kind: None, vector, support: None, label: label.into() }
    }

    pub fn bind(mut self, group: &GroupAction) -> Self {
        self.group_kind = Some(group.kind());
        self
    }

    pub fn with_support(mut self, support: Vec<usize>) -> Result<Self> {
        let mut inside = vec![false; self.vector.len()];
        for &i in &support {
            *inside
                .get_mut(i)
                .ok_or_else(|| Error::InvalidInput(format!("support index {i} out of range")))? = true;
        }
        if self.vector.iter().zip(&inside).any(|(&v, &s)| v != 0.0 && !s) {
            return Err(Error::InvalidInput("support misses a nonzero entry".into()));
        }
        self.support = Some(support);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// `n` independent uniform draws from the unit sphere in `R^d`.
pub fn random_sphere_templates(n: usize, d: usize, seed: u64) -> Result<Vec<Template>> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput("need n, d >= 1".into()));
    }
    let mut rng = rng::seeded(seed);
    Ok((0..n)
        .map(|i| Template::new(unit_gaussian(&mut rng, d), format!("sphere-{i}")))
        .collect())
}

pub(crate) fn unit_gaussian(rng: &mut SeededRng, d: usize) -> Vec<f64> {
    loop {
        let g = rng::gaussian_vec(rng, d);
        let nrm = linalg::norm(&g);
        if nrm > 1e-300 {
            return g.iter().map(|v| v / nrm).collect();
        }
    }
}

/// Bilipschitz bank size for `m` orbits' worth of generic random templates:
/// returns `(n_min, delta)` with
/// `delta = sqrt(pi / (128 m^4) / (2d + 3 ln(4 m^2)))` and
/// `n_min = ceil(12 m^2 d ln(2/delta + 1))`.
pub fn bilipschitz_parameters(m: usize, d: usize) -> Result<(u64, f64)> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidInput("need m, d >= 1".into()));
    }
    let (mf, df) = (m as f64, d as f64);
    let delta = (PI / (128.0 * mf.powi(4)) / (2.0 * df + 3.0 * (4.0 * mf * mf).ln())).sqrt();
    let n_min = (12.0 * mf * mf * df * (2.0 / delta + 1.0).ln()).ceil() as u64;
    Ok((n_min, delta))
}

/// Monte Carlo upper bound on the best `delta` such that the `k`-th smallest
/// `|<z_i, x>|` is at least `delta` for every unit `x`. Probes are random unit
/// vectors, the normalized `+-z_j`, and the coordinate axes.
pub fn projective_uniformity_estimate(
    templates: &[Vec<f64>],
    k: usize,
    num_probes: usize,
    seed: u64,
) -> Result<f64> {
    let n = templates.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..={n}")));
    }
    let d = templates[0].len();
    for t in templates {
        check_len(d, t.len())?;
        check_finite("template", t)?;
    }
    let kth = |x: &[f64]| -> f64 {
        let mut a: Vec<f64> = templates.iter().map(|z| linalg::dot(z, x).abs()).collect();
        a.sort_by(f64::total_cmp);
        a[k - 1]
    };
    let mut best = f64::INFINITY;
    for z in templates {
        let nz = linalg::norm(z);
        if nz > 0.0 {
            best = best.min(kth(&linalg::scale(z, 1.0 / nz)));
        }
    }
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        best = best.min(kth(&e));
    }
    let mut rng = rng::seeded(seed);
    for _ in 0..num_probes {
        best = best.min(kth(&unit_gaussian(&mut rng, d)));
    }
    Ok(best)
}

/// Degree and length of a discretized Hermite eigenfunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermiteSpec {
    pub degree: usize,
    pub length: usize,
}

pub const MAX_HERMITE_DEGREE: usize = 16;

/// Probabilists' Hermite polynomial `p_n(x)`, via
/// `p_{n+1}(x) = x p_n(x) - n p_{n-1}(x)`.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal quantile. Rational approximation (Acklam) followed by one
/// Halley step; the upper half uses `Q(p) = -Q(1 - p)`.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -normal_quantile(1.0 - p);
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671010050209e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let x = if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// `p_n(Q(i / (d + 1)))` for `i = 1..=d`, in ascending grid order.
pub fn hermite_template(spec: HermiteSpec) -> Result<Template> {
    if spec.degree > MAX_HERMITE_DEGREE {
        return Err(Error::InvalidInput(format!(
            "degree {} exceeds {MAX_HERMITE_DEGREE}",
            spec.degree
        )));
    }
    if spec.length == 0 {
        return Err(Error::InvalidInput("length must be positive".into()));
    }
    let d = spec.length;
    let v = (1..=d)
        .map(|i| hermite_poly(spec.degree, normal_quantile(i as f64 / (d + 1) as f64)))
        .collect();
    Ok(Template::new(v, format!("hermite-{}x{}", spec.degree, d)))
}

/// `Q'(p) = 1 / phi(Q(p))`.
pub fn normal_quantile_derivative(p: f64) -> f64 {
    1.0 / normal_pdf(normal_quantile(p))
}

/// The integral operator with kernel
/// `K(x, y) = min(x, y) (1 - max(x, y)) Q'(x) Q'(y)` on `(0, 1)`, applied to
/// samples `f_j = f(x_j)` on the grid `x_j = j / (m + 1)`, `j = 1..=m`.
///
/// Substituting `y = Phi(u)` removes the `Q'(y)` factor:
/// `L f(x) = Q'(x) [(1 - x) int_{u < Q(x)} Phi(u) f du + x int_{u > Q(x)} (1 - Phi(u)) f du]`.
/// `f` is taken piecewise linear in `u` between the nodes `Q(x_j)` and each
/// piece is integrated exactly (the trapezoid rule in `u` with exact kernel
/// weights). Past the end nodes `f` is extended by the cubic through the last
/// four samples, since the tails carry most of the weight of `Q'`.
pub fn sorted_gaussian_kernel_apply(f: &[f64]) -> Vec<f64> {
    let m = f.len();
    if m == 0 {
        return Vec::new();
    }
    let x: Vec<f64> = (1..=m).map(|i| i as f64 / (m + 1) as f64).collect();
    let u: Vec<f64> = x.iter().map(|&p| normal_quantile(p)).collect();
    // antiderivatives of Phi, u Phi, (1 - Phi), u (1 - Phi), all vanishing at the far end
    let lo0 = |t: f64| t * normal_cdf(t) + normal_pdf(t);
    let lo1 = |t: f64| 0.5 * ((t * t - 1.0) * normal_cdf(t) + t * normal_pdf(t));
    let hi0 = |t: f64| t * normal_cdf(-t) - normal_pdf(t);
    let hi1 = |t: f64| 0.5 * ((t * t - 1.0) * normal_cdf(-t) - t * normal_pdf(t));
    let slope = |j: usize| if m > 1 { (f[j + 1] - f[j]) / (u[j + 1] - u[j]) } else { 0.0 };
    // int_a^b w(t) (f_j + beta (t - u_j)) dt from antiderivatives of w and t w
    let piece = |w0: &dyn Fn(f64) -> f64, w1: &dyn Fn(f64) -> f64, a: f64, b: f64, j: usize, beta: f64| {
        (f[j] - beta * u[j]) * (w0(b) - w0(a)) + beta * (w1(b) - w1(a))
    };
    let mut below = vec![0.0; m];
    let end = TAIL_NODES.min(m);
    below[0] = lower_tail_moments(u[0], end)
        .iter()
        .zip(monomial_fit(&u[..end], &f[..end]))
        .map(|(mk, c)| mk * c)
        .sum();
    for j in 1..m {
        below[j] = below[j - 1] + piece(&lo0, &lo1, u[j - 1], u[j], j - 1, slope(j - 1));
    }
    let mut above = vec![0.0; m];
    // int_a^inf t^k (1 - Phi(t)) dt = (-1)^k int_-inf^-a t^k Phi(t) dt
    above[m - 1] = lower_tail_moments(-u[m - 1], end)
        .iter()
        .zip(monomial_fit(&u[m - end..], &f[m - end..]))
        .enumerate()
        .map(|(k, (mk, c))| if k % 2 == 0 { mk * c } else { -mk * c })
        .sum();
    for j in (0..m - 1).rev() {
        above[j] = above[j + 1] + piece(&hi0, &hi1, u[j], u[j + 1], j, slope(j));
    }
    (0..m)
        .map(|i| normal_quantile_derivative(x[i]) * ((1.0 - x[i]) * below[i] + x[i] * above[i]))
        .collect()
}

const TAIL_NODES: usize = 4;

/// `int_-inf^a t^k Phi(t) dt` for `k < count`.
fn lower_tail_moments(a: f64, count: usize) -> Vec<f64> {
    // j_k = int_-inf^a t^k phi(t) dt
    let mut j = vec![normal_cdf(a), -normal_pdf(a)];
    for k in 2..=count {
        j.push(-a.powi(k as i32 - 1) * normal_pdf(a) + (k - 1) as f64 * j[k - 2]);
    }
    (0..count)
        .map(|k| (a.powi(k as i32 + 1) * normal_cdf(a) - j[k + 1]) / (k + 1) as f64)
        .collect()
}

/// Coefficients `c_k` of the interpolating polynomial `sum c_k t^k`.
fn monomial_fit(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    let a = DMatrix::from_fn(n, n, |i, k| t[i].powi(k as i32));
    a.lu().solve(&DVector::from_column_slice(v)).map(|c| c.iter().copied().collect()).unwrap_or_else(|| vec![0.0; n])
}

fn cyclic_offset(i: usize, n: usize) -> usize {
    i.min(n - i)
}

/// Indicator templates `1_S - 1_{B \ S}` on a cyclic grid of length
/// `grid_len`, where `B` is the ball of radius `3r` around cell 0 and `r`
/// is the largest cyclic distance from cell 0 over all sets.
pub fn indicator_templates(sets: &[Vec<usize>], grid_len: usize) -> Result<Vec<Template>> {
    if sets.is_empty() {
        return Err(Error::InvalidInput("no sets".into()));
    }
    for s in sets {
        if s.is_empty() {
            return Err(Error::InvalidInput("empty indicator set".into()));
        }
        if let Some(&i) = s.iter().find(|&&i| i >= grid_len) {
            return Err(Error::InvalidInput(format!("cell {i} outside grid of length {grid_len}")));
        }
    }
    let r = sets
        .iter()
        .flatten()
        .map(|&i| cyclic_offset(i, grid_len))
        .max()
        .unwrap_or(0);
    if 2 * 3 * r + 1 > grid_len {
        return Err(Error::InvalidInput(format!(
            "ball of radius {} does not fit a grid of length {grid_len}",
            3 * r
        )));
    }
    Ok(sets
        .iter()
        .enumerate()
        .map(|(si, s)| {
            let mut v: Vec<f64> = (0..grid_len)
                .map(|i| if cyclic_offset(i, grid_len) <= 3 * r { -1.0 } else { 0.0 })
                .collect();
            for &i in s {
                v[i] = 1.0;
            }
            let support = (0..grid_len).filter(|&i| v[i] != 0.0).collect();
            let mut t = Template::new(v, format!("indicator-{si}"));
            t.support = Some(support);
            t.group_kind = Some(GroupKind::CyclicShift);
            t
        })
        .collect())
}

fn dense(m: &[f64], n: usize) -> Result<DMatrix<f64>> {
    check_len(n * n, m.len())?;
    check_finite("matrix", m)?;
    Ok(DMatrix::from_row_slice(n, n, m))
}

/// `M^{-1/2}` for symmetric positive definite `M`.
fn inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let low = eig.eigenvalues.min();
    if low <= 1e-12 * top.max(1.0) {
        return Err(Error::NotPositiveDefinite(low));
    }
    let d = DVector::from_iterator(m.nrows(), eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose())
}

/// Eigenpairs of `A^{-1/2} B A^{-1/2}`, ascending.
fn relative_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<(f64, DVector<f64>)>)> {
    let s = inv_sqrt(a)?;
    inv_sqrt(b)?;
    let m = &s * b * &s;
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok((s, pairs))
}

/// Thompson part metric `max |log eig(A^{-1/2} B A^{-1/2})|` between
/// `dim x dim` positive definite matrices (row-major).
pub fn thompson_distance(a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
    let (_, pairs) = relative_eigen(&dense(a, dim)?, &dense(b, dim)?)?;
    Ok(pairs.iter().map(|(l, _)| l.ln().abs()).fold(0.0, f64::max))
}

/// Largest cyclic offset `|i - j|` with a nonzero entry.
pub fn circulant_bandwidth(m: &[f64], n: usize) -> usize {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| m[i * n + j] != 0.0)
        .map(|(i, j)| cyclic_offset((j + n - i) % n, n))
        .max()
        .unwrap_or(0)
}

/// Covariance of `h * white noise` (circular convolution): the circulant
/// matrix with first row `c[j] = sum_i h_i h_{i+j}` (cyclically).
pub fn circulant_from_taps(taps: &[f64], n: usize) -> Result<Vec<f64>> {
    if taps.is_empty() || taps.len() > n {
        return Err(Error::InvalidInput("need 1..=n taps".into()));
    }
    let mut h = vec![0.0; n];
    h[..taps.len()].copy_from_slice(taps);
    let c: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| h[i] * h[(i + j) % n]).sum())
        .collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = c[(j + n - i) % n];
        }
    }
    Ok(m)
}

/// One draw `x[i] = sum_j taps[j] g[i - j]` with `g` white Gaussian noise.
pub fn sample_circulant(taps: &[f64], n: usize, rng: &mut SeededRng) -> Vec<f64> {
    let g = rng::gaussian_vec(rng, n);
    (0..n)
        .map(|i| taps.iter().enumerate().map(|(j, &t)| t * g[(i + n - j) % n]).sum())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixtureClass {
    A,
    B,
}

/// Shift-invariant discriminator between two stationary Gaussians: predicts
/// the high-variance class when `<<[z],[x]>> > threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmmClassifier {
    pub template: Vec<f64>,
    pub threshold: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
    pub k: usize,
    pub bandwidth: usize,
    /// Class whose variance along `z` is larger.
    pub high_class: MixtureClass,
    pub thompson: f64,
}

impl GmmClassifier {
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(mf_cyclic(&self.template, x, true)?.value)
    }

    pub fn predict(&self, x: &[f64]) -> Result<MixtureClass> {
        let high = self.score(x)? > self.threshold;
        Ok(match (high, self.high_class) {
            (true, c) => c,
            (false, MixtureClass::A) => MixtureClass::B,
            (false, MixtureClass::B) => MixtureClass::A,
        })
    }
}

/// Builds the template and threshold separating `N(0, A)` from `N(0, B)` for
/// circulant `n x n` covariances. The template lives on the leading
/// `k = floor(sqrt(n/2))` coordinates.
pub fn gmm_classifier(a: &[f64], b: &[f64], c: f64) -> Result<GmmClassifier> {
    let n = (a.len() as f64).sqrt().round() as usize;
    check_len(n * n, a.len())?;
    check_len(n * n, b.len())?;
    if !(c > std::f64::consts::LN_2) {
        return Err(Error::InvalidInput(format!("C = {c} must exceed ln 2")));
    }
    let k = ((n as f64 / 2.0).sqrt()).floor() as usize;
    if k == 0 {
        return Err(Error::InvalidInput("dimension too small".into()));
    }
    for (name, m) in [("A", a), ("B", b)] {
        let circulant = (0..n).all(|i| (0..n).all(|j| m[i * n + j] == m[((i + 1) % n) * n + (j + 1) % n]));
        if !circulant {
            return Err(Error::InvalidInput(format!("{name} is not circulant")));
        }
    }
    let bandwidth = circulant_bandwidth(a, n).max(circulant_bandwidth(b, n));
    if bandwidth > k {
        return Err(Error::InvalidInput(format!("bandwidth {bandwidth} exceeds k = {k}")));
    }
    let lead = |m: &[f64]| DMatrix::from_fn(k, k, |i, j| m[i * n + j]);
    let (ak, bk) = (lead(a), lead(b));
    dense(a, n)?;
    dense(b, n)?;
    let (sa, pairs) = relative_eigen(&ak, &bk)?;
    let lmin = pairs.first().expect("k >= 1").0;
    let (lmax, vmax) = pairs.last().cloned().expect("k >= 1");
    let thompson = lmax.ln().abs().max(lmin.ln().abs());
    if thompson < c {
        return Err(Error::InvalidInput(format!(
            "Thompson distance {thompson} is below C = {c}"
        )));
    }
    // Orient so that `low` is the class with smaller variance along z.
    let (zk, high_class, low, high) = if lmax.ln() >= -lmin.ln() {
        (&sa * vmax, MixtureClass::B, &ak, &bk)
    } else {
        let (sb, pairs_b) = relative_eigen(&bk, &ak)?;
        let v = pairs_b.last().expect("k >= 1").1.clone();
        (&sb * v, MixtureClass::A, &bk, &ak)
    };
    let quad = |m: &DMatrix<f64>| (zk.transpose() * m * &zk)[(0, 0)];
    let ln_n = (n as f64).ln();
    let half = (c.exp() / 2.0).sqrt();
    let (c1, c2) = (2.0 * half, 2.0 / half);
    let theta1 = (c1 * quad(low) * ln_n).sqrt();
    let theta2 = (0.5 * c2 * quad(high) * ln_n).sqrt();
    let mut template = vec![0.0; n];
    template[..k].copy_from_slice(zk.as_slice());
    Ok(GmmClassifier {
        template,
        threshold: 0.5 * (theta1 + theta2),
        theta1,
        theta2,
        c1,
        c2,
        c,
        k,
        bandwidth,
        high_class,
        thompson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_templates_are_unit() {
        for t in random_sphere_templates(50, 7, 3).unwrap() {
            assert!((linalg::norm(&t.vector) - 1.0).abs() < 1e-12);
        }
        for t in random_sphere_templates(20, 1, 4).unwrap() {
            assert!(t.vector[0] == 1.0 || t.vector[0] == -1.0);
        }
        assert_eq!(random_sphere_templates(3, 4, 9).unwrap(), random_sphere_templates(3, 4, 9).unwrap());
    }

    #[test]
    fn bilipschitz_values() {
        // Frozen from a 50-digit evaluation of the same closed form.
        let (n, delta) = bilipschitz_parameters(1, 1).unwrap();
        assert!((delta - 0.063127555390670546).abs() < 1e-15);
        assert_eq!(n, 42);
        let (n, delta) = bilipschitz_parameters(2, 3).unwrap();
        assert!((delta - 0.010350762113107006).abs() < 1e-15);
        assert_eq!(n, 759);
        assert!(bilipschitz_parameters(3, 1).unwrap().1 < bilipschitz_parameters(2, 1).unwrap().1);
    }

    #[test]
    fn uniformity_estimates() {
        let basis = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(projective_uniformity_estimate(&basis, 1, 100, 1).unwrap() <= 0.5f64.sqrt());
        let k2 = projective_uniformity_estimate(&basis, 2, 20_000, 1).unwrap();
        assert!(k2 >= 0.5f64.sqrt() - 1e-12 && k2 < 0.5f64.sqrt() + 1e-3);
        let z = vec![0.6, -0.8, 0.0];
        let a = projective_uniformity_estimate(&[z.clone(), z.clone()], 2, 500, 5).unwrap();
        let b = projective_uniformity_estimate(&[z], 1, 500, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hermite_values() {
        let got: Vec<f64> = (0..4).map(|n| hermite_poly(n, 2.0)).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 2.0]);
        assert_eq!(hermite_poly(4, 0.0), 3.0);
    }

    #[test]
    fn quantile_accuracy() {
        assert_eq!(normal_quantile(0.5), 0.0);
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-13);
        assert!((normal_quantile(0.75) - 0.6744897501960817).abs() < 1e-14);
        for &p in &[1e-9, 1e-6, 0.01, 0.02425, 0.1, 0.3, 0.6, 0.9, 0.999, 1.0 - 1e-9] {
            let x = normal_quantile(p);
            let back = if p < 0.5 { normal_cdf(x) } else { 1.0 - normal_cdf(-x) };
            assert!(((back - p) / p.min(1.0 - p)).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn hermite_template_shapes() {
        let t = hermite_template(HermiteSpec { degree: 0, length: 5 }).unwrap();
        assert_eq!(t.vector, vec![1.0; 5]);
        let t = hermite_template(HermiteSpec { degree: 1, length: 3 }).unwrap();
        let q = normal_quantile(0.75);
        assert!((t.vector[0] + q).abs() < 1e-15 && t.vector[1] == 0.0 && (t.vector[2] - q).abs() < 1e-15);
        let t = hermite_template(HermiteSpec { degree: 1, length: 9 }).unwrap();
        assert_eq!(t.vector[4], 0.0);
        assert!(hermite_template(HermiteSpec { degree: 17, length: 4 }).is_err());
    }

    #[test]
    fn indicator_margins() {
        let ts = indicator_templates(&[vec![0, 1], vec![0, 2]], 32).unwrap();
        let ind = |s: &[usize]| {
            let mut v = vec![0.0; 32];
            s.iter().for_each(|&i| v[i] = 1.0);
            v
        };
        let own = mf_cyclic(&ts[0].vector, &ind(&[0, 1]), false).unwrap().value;
        let other = mf_cyclic(&ts[0].vector, &ind(&[0, 2]), false).unwrap().value;
        assert_eq!(own, 2.0);
        assert!(other < own);
        let single = indicator_templates(&[vec![0]], 8).unwrap();
        assert_eq!(single[0].vector[0], 1.0);
        assert!(indicator_templates(&[vec![0, 6]], 16).is_err());
    }

    #[test]
    fn thompson_and_diagonal_gmm() {
        let d = thompson_distance(&[1.0, 0.0, 0.0, 1.0], &[4.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-12);
        let n = 32;
        let c: f64 = 1.5;
        let a = linalg::identity(n);
        let b = linalg::scale(&a, (2.0 * c).exp());
        let g = gmm_classifier(&a, &b, c).unwrap();
        assert!((g.thompson - 2.0 * c).abs() < 1e-12);
        assert!(g.theta1 <= g.theta2);
        let z = &g.template[..g.k];
        let ratio = linalg::dot(z, &linalg::scale(z, (2.0 * c).exp())) / linalg::norm_sq(z);
        assert!(ratio >= c.exp());
        assert!(gmm_classifier(&a, &a, c).is_err());
    }
}
