//! PCA, pooled-covariance LDA, and joint hinge-loss training of templates
//! with a linear classifier.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{subgradient, Selection};
use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::filter_bank_vectors;
use crate::group::GroupAction;
use crate::linalg;
use crate::templates::random_sphere_templates;

fn check_matrix(rows: &[Vec<f64>]) -> Result<usize> {
    let f = rows.first().ok_or_else(|| Error::InvalidInput("no samples".into()))?.len();
    if f == 0 {
        return Err(Error::InvalidInput("zero-width features".into()));
    }
    for r in rows {
        check_len(f, r.len())?;
        check_finite("features", r)?;
    }
    Ok(f)
}

/// Mean and `F x k` orthonormal basis, stored column by column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

impl Pca {
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.mean.len(), x.len())?;
        let c = linalg::sub(x, &self.mean);
        Ok(self.basis.iter().map(|b| linalg::dot(b, &c)).collect())
    }

    pub fn reconstruct(&self, coords: &[f64]) -> Result<Vec<f64>> {
        check_len(self.k(), coords.len())?;
        let mut out = self.mean.clone();
        for (b, &c) in self.basis.iter().zip(coords) {
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

/// Top-`k` eigenvectors of the sample covariance (divisor `N - 1`), each
/// signed so that its largest-magnitude coordinate is positive.
pub fn pca_fit(features: &[Vec<f64>], k: usize) -> Result<Pca> {
    let f = check_matrix(features)?;
    let n = features.len();
    if k == 0 || n < 2 || k > (n - 1).min(f) {
        return Err(Error::InvalidInput(format!(
            "k = {k} must lie in 1..={} for {n} samples of width {f}",
            (n.max(1) - 1).min(f)
        )));
    }
    let mut mean = vec![0.0; f];
    for r in features {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / n as f64;
        }
    }
    let centered = DMatrix::from_fn(n, f, |i, j| features[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut basis = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let lead = (0..f).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
        basis.push(v);
        variances.push(eig.eigenvalues[j].max(0.0));
    }
    Ok(Pca { mean, basis, variances })
}

/// Linear discriminant with a shared covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lda {
    /// Sorted class labels.
    pub classes: Vec<String>,
    pub means: Vec<Vec<f64>>,
    /// `Sigma^{-1} mu_c`, one row per class.
    pub weights: Vec<Vec<f64>>,
    /// `-mu_c^T Sigma^{-1} mu_c / 2 + ln pi_c`.
    pub biases: Vec<f64>,
    /// Set when the covariance is unusable and prediction uses the nearest
    /// class mean.
    pub nearest_mean: bool,
}

pub fn lda_fit(features: &[Vec<f64>], labels: &[String]) -> Result<Lda> {
    let f = check_matrix(features)?;
    check_len(features.len(), labels.len())?;
    let n = features.len();
    let mut classes = labels.to_vec();
    classes.sort();
    classes.dedup();
    let nc = classes.len();
    let idx: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).expect("label present")).collect();
    let mut means = vec![vec![0.0; f]; nc];
    let mut counts = vec![0usize; nc];
    for (r, &c) in features.iter().zip(&idx) {
        counts[c] += 1;
        for (m, v) in means[c].iter_mut().zip(r) {
            *m += v;
        }
    }
    for (m, &c) in means.iter_mut().zip(&counts) {
        m.iter_mut().for_each(|v| *v /= c as f64);
    }
    let mut cov = DMatrix::<f64>::zeros(f, f);
    for (r, &c) in features.iter().zip(&idx) {
        let d = DVector::from_iterator(f, r.iter().zip(&means[c]).map(|(a, b)| a - b));
        cov += &d * d.transpose();
    }
    let dof = n - nc;
    let trace = cov.trace();
    if dof == 0 || !(trace > 0.0) {
        return Ok(Lda { classes, means, weights: Vec::new(), biases: Vec::new(), nearest_mean: true });
    }
    cov /= dof as f64;
    let lambda = 1e-6 * cov.trace() / f as f64;
    for i in 0..f {
        cov[(i, i)] += lambda;
    }
    let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite(lambda))?;
    let mut weights = Vec::with_capacity(nc);
    let mut biases = Vec::with_capacity(nc);
    for (m, &c) in means.iter().zip(&counts) {
        let w = chol.solve(&DVector::from_column_slice(m));
        let w: Vec<f64> = w.iter().copied().collect();
        biases.push(-0.5 * linalg::dot(&w, m) + (c as f64 / n as f64).ln());
        weights.push(w);
    }
    if weights.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite discriminant".into()));
    }
    Ok(Lda { classes, means, weights, biases, nearest_mean: false })
}

impl Lda {
    /// Discriminant scores in class order; negated squared distances to the
    /// class means under the nearest-mean fallback.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.means[0].len(), x.len())?;
        check_finite("feature", x)?;
        Ok(if self.nearest_mean {
            self.means.iter().map(|m| -linalg::norm_sq(&linalg::sub(x, m))).collect()
        } else {
            self.weights.iter().zip(&self.biases).map(|(w, b)| linalg::dot(w, x) + b).collect()
        })
    }
}

/// Highest-scoring class; ties go to the lexicographically smallest label.
pub fn lda_predict(model: &Lda, x: &[f64]) -> Result<String> {
    let s = model.scores(x)?;
    let best = (1..s.len()).fold(0, |b, i| if s[i] > s[b] { i } else { b });
    Ok(model.classes[best].clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub epochs: usize,
    /// Step `eta0 / sqrt(t)` at epoch `t >= 1`.
    pub eta0: f64,
    /// Ridge weight on `w`.
    pub rho: f64,
    /// When false, templates stay at their initial values.
    pub train_templates: bool,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { epochs: 200, eta0: 0.5, rho: 1e-3, train_templates: true, seed: 0 }
    }
}

/// Binary linear classifier on max filter features. `classes[1]` is the
/// positive class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub classes: [String; 2],
    pub w: Vec<f64>,
    pub b: f64,
}

impl Svm {
    pub fn decision(&self, features: &[f64]) -> Result<f64> {
        check_len(self.w.len(), features.len())?;
        Ok(linalg::dot(&self.w, features) + self.b)
    }

    pub fn predict(&self, features: &[f64]) -> Result<String> {
        Ok(self.classes[usize::from(self.decision(features)? > 0.0)].clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmTraining {
    pub templates: Vec<Vec<f64>>,
    pub svm: Svm,
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Objective after each epoch, at the iterate being trained.
    pub history: Vec<f64>,
    /// `"averaged"` or `"best"`.
    pub reported: String,
}

/// Indices a template may occupy: slice 0 for sliding windows, everything
/// otherwise.
fn template_mask(group: &GroupAction) -> Vec<bool> {
    match group {
        GroupAction::SlidingWindowShift { channels, width, .. } => {
            (0..group.dim()).map(|i| i < channels * width).collect()
        }
        g => vec![true; g.dim()],
    }
}

fn initial_templates(group: &GroupAction, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mask = template_mask(group);
    let live = mask.iter().filter(|&&m| m).count();
    let raw = random_sphere_templates(n, live, seed)?;
    Ok(raw
        .into_iter()
        .map(|t| {
            let mut v = vec![0.0; mask.len()];
            let mut src = t.vector.into_iter();
            for (o, &m) in v.iter_mut().zip(&mask) {
                if m {
                    *o = src.next().expect("live length");
                }
            }
            v
        })
        .collect())
}

fn objective(feats: &[Vec<f64>], ys: &[f64], w: &[f64], b: f64, rho: f64) -> f64 {
    let hinge: f64 = feats
        .iter()
        .zip(ys)
        .map(|(f, y)| (1.0 - y * (linalg::dot(w, f) + b)).max(0.0))
        .sum();
    hinge / feats.len() as f64 + rho * linalg::norm_sq(w)
}

fn features_of(group: &GroupAction, templates: &[Vec<f64>], xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    xs.par_iter().map(|x| filter_bank_vectors(group, templates, x)).collect()
}

/// Subgradient descent on `mean hinge + rho |w|^2` over templates and
/// `(w, b)` jointly. Template gradients use the first-witness subgradient
/// and are masked to slice 0 for sliding windows. The returned model is the
/// better of the averaged iterate and the best iterate seen, so its loss
/// never exceeds the initial loss.
pub fn train_svm_templates(
    xs: &[Vec<f64>],
    labels: &[String],
    group: &GroupAction,
    n_templates: usize,
    config: &SvmConfig,
) -> Result<SvmTraining> {
    let d = check_matrix(xs)?;
    check_len(group.dim(), d)?;
    check_len(xs.len(), labels.len())?;
    if n_templates == 0 || config.epochs == 0 || !(config.eta0 > 0.0) || !(config.rho >= 0.0) {
        return Err(Error::InvalidInput("need n_templates, epochs, eta0 > 0 and rho >= 0".into()));
    }
    let mut classes = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() != 2 {
        return Err(Error::InvalidInput(format!("need exactly 2 classes, found {}", classes.len())));
    }
    let ys: Vec<f64> = labels.iter().map(|l| if *l == classes[1] { 1.0 } else { -1.0 }).collect();
    let n = xs.len() as f64;
    let mask = template_mask(group);

    let mut z = initial_templates(group, n_templates, config.seed)?;
    let mut w = vec![0.0; n_templates];
    let mut b = 0.0;
    let feats = features_of(group, &z, xs)?;
    let initial_loss = objective(&feats, &ys, &w, b, config.rho);
    let mut best = (initial_loss, z.clone(), w.clone(), b);
    let mut avg_w = vec![0.0; n_templates];
    let mut avg_b = 0.0;
    let mut history = Vec::with_capacity(config.epochs);
    let mut feats = feats;

    for t in 1..=config.epochs {
        let eta = config.eta0 / (t as f64).sqrt();
        let active: Vec<usize> = (0..xs.len())
            .filter(|&i| ys[i] * (linalg::dot(&w, &feats[i]) + b) < 1.0)
            .collect();
        let mut gw: Vec<f64> = w.iter().map(|v| 2.0 * config.rho * v).collect();
        let mut gb = 0.0;
        for &i in &active {
            for (g, f) in gw.iter_mut().zip(&feats[i]) {
                *g -= ys[i] * f / n;
            }
            gb -= ys[i] / n;
        }
        if config.train_templates && !active.is_empty() {
            let grads = z
                .par_iter()
                .enumerate()
                .map(|(j, zj)| {
                    let mut g = vec![0.0; d];
                    for &i in &active {
                        let s = subgradient(group, zj, &xs[i], Selection::First)?;
                        let c = ys[i] * w[j] / n;
                        for (a, v) in g.iter_mut().zip(&s) {
                            *a -= c * v;
                        }
                    }
                    Ok(g)
                })
                .collect::<Result<Vec<_>>>()?;
            for (zj, g) in z.iter_mut().zip(&grads) {
                for ((a, v), &m) in zj.iter_mut().zip(g).zip(&mask) {
                    if m {
                        *a -= eta * v;
                    }
                }
            }
        }
        for (a, g) in w.iter_mut().zip(&gw) {
            *a -= eta * g;
        }
        b -= eta * gb;
        feats = features_of(group, &z, xs)?;
        let loss = objective(&feats, &ys, &w, b, config.rho);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("training diverged at epoch {t}")));
        }
        history.push(loss);
        if loss < best.0 {
            best = (loss, z.clone(), w.clone(), b);
        }
        for (a, v) in avg_w.iter_mut().zip(&w) {
            *a += (v - *a) / t as f64;
        }
        avg_b += (b - avg_b) / t as f64;
    }

    // averaged classifier over the final templates
    let avg_loss = objective(&feats, &ys, &avg_w, avg_b, config.rho);
    let (final_loss, templates, w, b, reported) = if avg_loss <= best.0 {
        (avg_loss, z, avg_w, avg_b, "averaged")
    } else {
        (best.0, best.1, best.2, best.3, "best")
    };
    Ok(SvmTraining {
        templates,
        svm: Svm { classes: [classes[0].clone(), classes[1].clone()], w, b },
        initial_loss,
        final_loss,
        history,
        reported: reported.into(),
    })
}
