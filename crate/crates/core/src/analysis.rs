//! Monte Carlo checks of separation, bilipschitz bounds, and stability of
//! max filter banks under small deformations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::{filter_bank_vectors, quotient_distance};
use crate::group::{GroupAction, Witness};
use crate::groups::cyclic::{mf_cyclic, CyclicCorrelator};
use crate::linalg;
use crate::pipeline::learn::{pca_fit, Pca};
use crate::rng::{self, SeededRng};
use crate::templates::{bilipschitz_parameters, unit_gaussian};

/// A uniformly random element for finite kinds; a Haar-distributed one for
/// the orthogonal and circle kinds.
pub fn random_element(group: &GroupAction, rng: &mut SeededRng) -> Witness {
    let shuffled = |rng: &mut SeededRng, n: usize| {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    };
    let random_phase = |rng: &mut SeededRng| Complex64::from_polar(1.0, 2.0 * PI * rng::uniform(rng));
    match group {
        GroupAction::Enumerated(g) => Witness::Element(rng::below(rng, g.matrices().len())),
        GroupAction::CyclicShift { n } => Witness::Shift(rng::below(rng, *n)),
        GroupAction::SlidingWindowShift { positions, .. } => Witness::Shift(rng::below(rng, *positions)),
        GroupAction::FullPermutation { d } => Witness::Permutation(shuffled(rng, *d)),
        GroupAction::ColumnPermutation { n, .. } => Witness::Permutation(shuffled(rng, *n)),
        GroupAction::PatchPermutation(spec) => {
            let mut perm: Vec<usize> = (0..spec.len()).collect();
            for patch in spec.patches() {
                let mut imgs = patch.clone();
                imgs.shuffle(rng);
                for (&i, &j) in patch.iter().zip(&imgs) {
                    perm[i] = j;
                }
            }
            Witness::Permutation(perm)
        }
        GroupAction::SignedPermutation { d } => Witness::SignedPermutation {
            perm: shuffled(rng, *d),
            signs: (0..*d).map(|_| if rng::uniform(rng) < 0.5 { -1 } else { 1 }).collect(),
        },
        GroupAction::SignFlips { d } => Witness::SignedPermutation {
            perm: (0..*d).collect(),
            signs: (0..*d).map(|_| if rng::uniform(rng) < 0.5 { -1 } else { 1 }).collect(),
        },
        GroupAction::FullOrthogonal { d: k } | GroupAction::LeftOrthogonal { k, .. } => {
            Witness::Orthogonal { dim: *k, matrix: haar_orthogonal(*k, rng) }
        }
        GroupAction::PhaseCircle { .. } => Witness::Phase(random_phase(rng)),
        GroupAction::ShiftAndConjugate { n } => Witness::ShiftConjugate {
            shift: rng::below(rng, *n),
            conjugate: rng::uniform(rng) < 0.5,
            phase: random_phase(rng),
        },
    }
}

/// Gram-Schmidt on a Gaussian matrix, with column signs fixed by the
/// diagonal of `R`, which gives the Haar measure on `O(k)`.
fn haar_orthogonal(k: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let g = rng::gaussian_vec(rng, k * k);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut ok = true;
        for c in 0..k {
            let mut v: Vec<f64> = (0..k).map(|r| g[r * k + c]).collect();
            for u in &q {
                let p = linalg::dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
            let nv = linalg::norm(&v);
            if nv < 1e-10 {
                ok = false;
                break;
            }
            q.push(v.iter().map(|a| a / nv).collect());
        }
        if ok {
            let mut m = vec![0.0; k * k];
            for (c, col) in q.iter().enumerate() {
                for r in 0..k {
                    m[r * k + c] = col[r];
                }
            }
            return m;
        }
    }
}

/// How random pairs `(x, y)` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub samples: usize,
    /// Fraction of pairs drawn as `y = x + epsilon * noise`; the rest are
    /// independent standard Gaussians.
    pub near_fraction: f64,
    pub epsilon: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec { samples: 10_000, near_fraction: 0.5, epsilon: 1e-3 }
    }
}

fn draw_pair(spec: &SamplerSpec, d: usize, rng: &mut SeededRng) -> (Vec<f64>, Vec<f64>) {
    let x = rng::gaussian_vec(rng, d);
    if rng::uniform(rng) < spec.near_fraction {
        let noise = rng::gaussian_vec(rng, d);
        let y = linalg::add(&x, &linalg::scale(&noise, spec.epsilon));
        (x, y)
    } else {
        (x, rng::gaussian_vec(rng, d))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub trial: usize,
    pub distance: f64,
    pub feature_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub lower_est: f64,
    pub upper_est: f64,
    pub argmin: PairDescriptor,
    pub argmax: PairDescriptor,
    pub samples: usize,
    pub skipped: usize,
    /// `delta` of the bilipschitz guarantee when the group order is known.
    pub theory_delta: Option<f64>,
    /// Bank size the guarantee asks for.
    pub theory_n_min: Option<u64>,
    /// `|{z_i}|_F`, a hard ceiling on the upper Lipschitz constant.
    pub theory_upper: f64,
}

fn check_bank(group: &GroupAction, bank: &[Vec<f64>]) -> Result<()> {
    if bank.is_empty() {
        return Err(Error::InvalidInput("empty filter bank".into()));
    }
    for z in bank {
        check_len(group.dim(), z.len())?;
        check_finite("template", z)?;
    }
    Ok(())
}

/// Ratios `|Phi(x) - Phi(y)| / d([x],[y])` over random pairs.
pub fn estimate_lipschitz(
    group: &GroupAction,
    bank: &[Vec<f64>],
    sampler: &SamplerSpec,
    seed: u64,
) -> Result<LipschitzReport> {
    check_bank(group, bank)?;
    let d = group.dim();
    let rows = (0..sampler.samples)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::substream(seed, t as u64);
            let (x, y) = draw_pair(sampler, d, &mut r);
            let dist = quotient_distance(group, &x, &y)?;
            if dist <= 1e-8 {
                return Ok(None);
            }
            let gap = linalg::norm(&linalg::sub(
                &filter_bank_vectors(group, bank, &x)?,
                &filter_bank_vectors(group, bank, &y)?,
            ));
            Ok(Some(PairDescriptor { trial: t, distance: dist, feature_gap: gap }))
        })
        .collect::<Result<Vec<Option<PairDescriptor>>>>()?;
    let used: Vec<PairDescriptor> = rows.into_iter().flatten().collect();
    let skipped = sampler.samples - used.len();
    let ratio = |p: &PairDescriptor| p.feature_gap / p.distance;
    let argmin = used
        .iter()
        .min_by(|a, b| ratio(a).total_cmp(&ratio(b)))
        .cloned()
        .ok_or_else(|| Error::InvalidInput("every sampled pair lies in one orbit".into()))?;
    let argmax = used.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).cloned().expect("nonempty");
    let theory = group
        .order()
        .and_then(|m| usize::try_from(m).ok())
        .map(|m| bilipschitz_parameters(m, d))
        .transpose()?;
    Ok(LipschitzReport {
        lower_est: ratio(&argmin),
        upper_est: ratio(&argmax),
        argmin,
        argmax,
        samples: used.len(),
        skipped,
        theory_delta: theory.map(|t| t.1),
        theory_n_min: theory.map(|t| t.0),
        theory_upper: bank.iter().map(|z| linalg::norm_sq(z)).sum::<f64>().sqrt(),
    })
}

pub enum SeparationPairs {
    Random { trials: usize, sampler: SamplerSpec },
    Explicit(Vec<(Vec<f64>, Vec<f64>)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub trials: usize,
    /// Pairs with `d([x],[y]) > 1e-6` that were checked.
    pub checked: usize,
    /// Checked pairs whose features agree to within `1e-9` in sup norm.
    pub violations: usize,
    pub violating_trials: Vec<usize>,
    /// Smallest sup-norm feature gap among checked pairs.
    pub min_gap: f64,
    /// Largest sup-norm gap between `x` and a random group image of `x`.
    pub invariance_max_gap: f64,
}

pub const SEPARATION_DISTANCE: f64 = 1e-6;
pub const SEPARATION_THRESHOLD: f64 = 1e-9;

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    linalg::max_abs_diff(a, b)
}

/// Counts distinct-orbit pairs that the bank fails to separate.
pub fn separation_test(
    group: &GroupAction,
    bank: &[Vec<f64>],
    pairs: &SeparationPairs,
    seed: u64,
) -> Result<SeparationReport> {
    check_bank(group, bank)?;
    let d = group.dim();
    let n = match pairs {
        SeparationPairs::Random { trials, .. } => *trials,
        SeparationPairs::Explicit(p) => p.len(),
    };
    let rows = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::substream(seed, t as u64);
            let (x, y) = match pairs {
                SeparationPairs::Random { sampler, .. } => draw_pair(sampler, d, &mut r),
                SeparationPairs::Explicit(p) => p[t].clone(),
            };
            let fx = filter_bank_vectors(group, bank, &x)?;
            let g = random_element(group, &mut r);
            let inv = sup_gap(&fx, &filter_bank_vectors(group, bank, &group.apply(&g, &x)?)?);
            if quotient_distance(group, &x, &y)? <= SEPARATION_DISTANCE {
                return Ok((None, inv));
            }
            let gap = sup_gap(&fx, &filter_bank_vectors(group, bank, &y)?);
            Ok((Some(gap), inv))
        })
        .collect::<Result<Vec<(Option<f64>, f64)>>>()?;
    let violating_trials: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.0.is_some_and(|g| g <= SEPARATION_THRESHOLD))
        .map(|(t, _)| t)
        .collect();
    Ok(SeparationReport {
        trials: n,
        checked: rows.iter().filter(|r| r.0.is_some()).count(),
        violations: violating_trials.len(),
        violating_trials,
        min_gap: rows.iter().filter_map(|r| r.0).fold(f64::INFINITY, f64::min),
        invariance_max_gap: rows.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}

/// Displacement `tau(x) = shift + sum_j a_j sin(2 pi j x / grid + phi_j)`,
/// in grid cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpSpec {
    pub shift: f64,
    /// `(a_j, phi_j)` for `j = 1, 2, ...`.
    pub modes: Vec<(f64, f64)>,
}

impl WarpSpec {
    pub fn translation(shift: f64) -> Self {
        WarpSpec { shift, modes: Vec::new() }
    }

    /// Random phases and amplitudes over `modes` frequencies, rescaled so the
    /// grid maximum of `|tau'|` equals `max_jacobian`.
    pub fn random(modes: usize, max_jacobian: f64, grid: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        let raw = WarpSpec {
            shift: 0.0,
            modes: (0..modes)
                .map(|j| (rng::gaussian(&mut r) / (j + 1) as f64, 2.0 * PI * rng::uniform(&mut r)))
                .collect(),
        };
        raw.scaled_to(max_jacobian, grid)
    }

    pub fn scaled_to(&self, max_jacobian: f64, grid: usize) -> Self {
        let cur = self.max_jacobian(grid);
        let s = if cur > 0.0 { max_jacobian / cur } else { 0.0 };
        WarpSpec { shift: self.shift, modes: self.modes.iter().map(|&(a, p)| (a * s, p)).collect() }
    }

    pub fn tau(&self, x: f64, grid: usize) -> f64 {
        let w = 2.0 * PI / grid as f64;
        self.shift
            + self
                .modes
                .iter()
                .enumerate()
                .map(|(j, &(a, p))| a * (w * (j + 1) as f64 * x + p).sin())
                .sum::<f64>()
    }

    pub fn tau_prime(&self, x: f64, grid: usize) -> f64 {
        let w = 2.0 * PI / grid as f64;
        self.modes
            .iter()
            .enumerate()
            .map(|(j, &(a, p))| {
                let f = w * (j + 1) as f64;
                a * f * (f * x + p).cos()
            })
            .sum()
    }

    pub fn max_jacobian(&self, grid: usize) -> f64 {
        (0..grid).map(|i| self.tau_prime(i as f64, grid).abs()).fold(0.0, f64::max)
    }
}

/// `(L f)(x) = f(x - tau(x))`, evaluating `f` between grid points by its
/// trigonometric interpolant, so integer shifts are exact and band-limited
/// signals are warped without interpolation blur.
pub fn warp_signal(f: &[f64], warp: &WarpSpec) -> Vec<f64> {
    let n = f.len();
    if n == 0 {
        return Vec::new();
    }
    let corr = CyclicCorrelator::new(n);
    let spec = corr.spectrum(&f.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
    let w = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| {
            let s = i as f64 - warp.tau(i as f64, n);
            let mut acc = spec[0].re;
            for (k, c) in spec.iter().enumerate().take(n.div_ceil(2)).skip(1) {
                // conjugate pairs k and n - k
                acc += 2.0 * (c * Complex64::from_polar(1.0, w * k as f64 * s)).re;
            }
            if n % 2 == 0 {
                acc += (spec[n / 2] * Complex64::from_polar(1.0, PI * s)).re;
            }
            acc / n as f64
        })
        .collect()
}

pub const MAX_JACOBIAN: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Grid maximum of `|tau'|`.
    pub distortion_size: f64,
    pub filter_gap: f64,
    /// `filter_gap / (|f| distortion_size)`, or 0 without distortion.
    pub ratio: f64,
}

/// Change in the cyclic max filter `<<[h],[f]>>` under the warp `L f`.
pub fn diffeo_stability_experiment(h: &[f64], f: &[f64], warp: &WarpSpec) -> Result<StabilityReport> {
    check_len(h.len(), f.len())?;
    check_finite("template", h)?;
    check_finite("signal", f)?;
    let grid = f.len();
    let jac = warp.max_jacobian(grid);
    if !(jac <= MAX_JACOBIAN * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("max |tau'| = {jac} exceeds {MAX_JACOBIAN}")));
    }
    let warped = warp_signal(f, warp);
    let gap = (mf_cyclic(h, f, true)?.value - mf_cyclic(h, &warped, true)?.value).abs();
    let nf = linalg::norm(f);
    let ratio = if jac > 0.0 && nf > 0.0 { gap / (nf * jac) } else { 0.0 };
    Ok(StabilityReport { distortion_size: jac, filter_gap: gap, ratio })
}

/// Gaussian bump `exp(-(i - c)^2 / (2 width^2))` centered on the grid,
/// with cyclic distance.
pub fn gaussian_bump(grid: usize, width: f64) -> Vec<f64> {
    let c = (grid / 2) as f64;
    (0..grid).map(|i| (-(i as f64 - c).powi(2) / (2.0 * width * width)).exp()).collect()
}

/// Random trigonometric polynomial with frequencies `1..=max_freq`.
pub fn band_limited_signal(grid: usize, max_freq: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::seeded(seed);
    let coef: Vec<(f64, f64)> = (1..=max_freq).map(|_| (rng::gaussian(&mut r), rng::gaussian(&mut r))).collect();
    (0..grid)
        .map(|i| {
            coef.iter()
                .enumerate()
                .map(|(j, &(a, b))| {
                    let t = 2.0 * PI * (j + 1) as f64 * i as f64 / grid as f64;
                    a * t.cos() + b * t.sin()
                })
                .sum()
        })
        .collect()
}

/// Median of pairwise slopes.
pub fn theil_sen_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mut slopes = Vec::new();
    for i in 0..xs.len().min(ys.len()) {
        for j in i + 1..xs.len().min(ys.len()) {
            if xs[j] != xs[i] {
                slopes.push((ys[j] - ys[i]) / (xs[j] - xs[i]));
            }
        }
    }
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(f64::total_cmp);
    let m = slopes.len();
    Some(if m % 2 == 1 { slopes[m / 2] } else { 0.5 * (slopes[m / 2 - 1] + slopes[m / 2]) })
}

/// One random warp shape from `seed`, rescaled to each requested Jacobian
/// size, so the sweep varies the magnitude of a fixed distortion.
pub fn stability_sweep(
    h: &[f64],
    f: &[f64],
    jacobians: &[f64],
    modes: usize,
    seed: u64,
) -> Result<Vec<StabilityReport>> {
    let base = WarpSpec::random(modes, 1.0, f.len(), seed);
    jacobians
        .iter()
        .map(|&j| diffeo_stability_experiment(h, f, &base.scaled_to(j, f.len())))
        .collect()
}

/// Unit templates drawn uniformly from the sphere, as raw vectors.
pub fn unit_bank(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::seeded(seed);
    (0..n).map(|_| unit_gaussian(&mut r, d)).collect()
}

/// `samples` iid standard Gaussian vectors in `R^d`, each sorted ascending.
pub fn sorted_gaussian_draws(samples: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut v = rng::gaussian_vec(&mut rng::substream(seed, i as u64), d);
            v.sort_by(f64::total_cmp);
            v
        })
        .collect()
}

/// Sample mean and top-`k` covariance eigenvectors of sorted Gaussian draws.
/// The eigenvectors approximate the discretized `p_n(Q(.))`, `n = 0..k`.
pub fn sorted_gaussian_components(samples: usize, d: usize, k: usize, seed: u64) -> Result<Pca> {
    pca_fit(&sorted_gaussian_draws(samples, d, seed), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::EnumeratedGroup;

    #[test]
    fn random_elements_are_valid() {
        let mut r = rng::seeded(1);
        for spec in ["cyclic:5", "perm:4", "signedperm:3", "signflips:3", "orth:3", "phase:2", "shiftconj:3", "leftorth:2x3", "colperm:2x3", "patchperm:2@4", "window:2x3"] {
            let g: GroupAction = spec.parse().unwrap();
            let w = random_element(&g, &mut r);
            let x = rng::gaussian_vec(&mut r, g.dim());
            let gx = g.apply(&w, &x).unwrap();
            assert!((linalg::norm(&gx) - linalg::norm(&x)).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn upper_estimate_respects_ceiling() {
        let g = GroupAction::Enumerated(EnumeratedGroup::sign(3));
        let bank = unit_bank(40, 3, 2);
        let spec = SamplerSpec { samples: 500, ..Default::default() };
        let rep = estimate_lipschitz(&g, &bank, &spec, 3).unwrap();
        assert!(rep.upper_est <= 40f64.sqrt() + 1e-6);
        assert!(rep.lower_est > 0.0 && rep.lower_est <= rep.upper_est);
        // duplicating every template scales both estimates by sqrt 2
        let twice: Vec<Vec<f64>> = bank.iter().chain(bank.iter()).cloned().collect();
        let rep2 = estimate_lipschitz(&g, &twice, &spec, 3).unwrap();
        assert!((rep2.upper_est - 2f64.sqrt() * rep.upper_est).abs() < 1e-9);
        assert!((rep2.lower_est - 2f64.sqrt() * rep.lower_est).abs() < 1e-9);
    }

    #[test]
    fn one_template_cannot_separate_permutations() {
        let g = GroupAction::FullPermutation { d: 3 };
        let bank = vec![vec![1.0, 0.0, 0.0]];
        let pairs = SeparationPairs::Explicit(vec![(vec![3.0, 1.0, 0.0], vec![3.0, 2.0, -1.0])]);
        let rep = separation_test(&g, &bank, &pairs, 0).unwrap();
        assert_eq!(rep.violations, 1);
    }

    #[test]
    fn translation_and_identity_warps() {
        let f = band_limited_signal(64, 4, 1);
        let h = gaussian_bump(64, 3.0);
        let rep = diffeo_stability_experiment(&h, &f, &WarpSpec::translation(5.0)).unwrap();
        assert!(rep.filter_gap <= 1e-9 * linalg::norm(&h) * linalg::norm(&f));
        let rep = diffeo_stability_experiment(&h, &f, &WarpSpec::translation(0.0)).unwrap();
        assert!(rep.filter_gap <= 1e-12 * linalg::norm(&h) * linalg::norm(&f));
        // off-grid shifts of a trigonometric polynomial are exact
        let c: Vec<f64> = (0..16).map(|i| (2.0 * PI * 3.0 * i as f64 / 16.0).cos()).collect();
        let moved = warp_signal(&c, &WarpSpec::translation(0.4));
        for (i, v) in moved.iter().enumerate() {
            assert!((v - (2.0 * PI * 3.0 * (i as f64 - 0.4) / 16.0).cos()).abs() < 1e-12);
        }
        let too_big = WarpSpec::random(3, 0.7, 64, 2);
        assert!(diffeo_stability_experiment(&h, &f, &too_big).is_err());
    }

    #[test]
    fn theil_sen_on_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 5.0, 100.0, 9.0];
        assert_eq!(theil_sen_slope(&xs, &ys), Some(2.0));
    }
}
