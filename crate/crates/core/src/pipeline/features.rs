//! Raw samples to invariant inputs: planar polygons, multichannel windows
//! and sorted-patch texture statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::groups::{ComplexVector, MatrixSignal, WindowedTensor};
use crate::pipeline::ingest::Image;
use crate::rng;
use crate::templates::{hermite_template, HermiteSpec};

/// Resamples a closed polygon at `n_samples` points equally spaced in arc
/// length (starting at the first vertex), subtracts the centroid of the
/// samples and scales the sampled polygon to unit perimeter.
pub fn district_embed(polygon: &[[f64; 2]], n_samples: usize) -> Result<ComplexVector> {
    if polygon.len() < 3 {
        return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
    }
    if n_samples < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    check_finite("polygon", &polygon.iter().flatten().copied().collect::<Vec<_>>())?;
    let pts: Vec<Complex64> = polygon.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let m = pts.len();
    let lens: Vec<f64> = (0..m).map(|i| (pts[(i + 1) % m] - pts[i]).norm()).collect();
    let perimeter: f64 = lens.iter().sum();
    if !(perimeter > 0.0) {
        return Err(Error::InvalidInput("degenerate polygon: zero perimeter".into()));
    }
    let mut samples = Vec::with_capacity(n_samples);
    let mut edge = 0;
    let mut start = 0.0;
    for j in 0..n_samples {
        let s = perimeter * j as f64 / n_samples as f64;
        while edge + 1 < m && start + lens[edge] <= s {
            start += lens[edge];
            edge += 1;
        }
        let t = if lens[edge] > 0.0 { ((s - start) / lens[edge]).clamp(0.0, 1.0) } else { 0.0 };
        samples.push(pts[edge] + (pts[(edge + 1) % m] - pts[edge]) * t);
    }
    let centroid = samples.iter().sum::<Complex64>() / n_samples as f64;
    for p in samples.iter_mut() {
        *p -= centroid;
    }
    let sampled: f64 = (0..n_samples).map(|i| (samples[(i + 1) % n_samples] - samples[i]).norm()).sum();
    if !(sampled > 1e-300) {
        return Err(Error::InvalidInput("degenerate polygon: samples coincide".into()));
    }
    Ok(ComplexVector::new(samples.into_iter().map(|p| p / sampled).collect()))
}

/// Lifts a `c x t` recording to the `c x w x (t - w + 1)` tensor of its
/// length-`w` windows, each fiber shifted to mean zero.
pub fn ecg_lift(x: &MatrixSignal, w: usize) -> Result<WindowedTensor> {
    let (c, t) = x.shape();
    if w == 0 || t < w {
        return Err(Error::InvalidInput(format!("window {w} does not fit a length-{t} recording")));
    }
    let positions = t - w + 1;
    let mut out = WindowedTensor::zeros(c, w, positions);
    for a in 0..positions {
        let slice = out.slice_mut(a);
        for ch in 0..c {
            let fiber = &mut slice[ch * w..(ch + 1) * w];
            for (i, f) in fiber.iter_mut().enumerate() {
                *f = x.get(ch, a + i);
            }
            let mean = fiber.iter().sum::<f64>() / w as f64;
            fiber.iter_mut().for_each(|f| *f -= mean);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TextureMode {
    /// Templates `p_n(Q(i / (d + 1)))` standing in for sorted Gaussians.
    #[default]
    Hermite,
    /// Literal iid Gaussian templates, one per (level, degree slot).
    RandomGaussian { seed: u64 },
}

fn texture_template(mode: TextureMode, level_idx: usize, degree_idx: usize, degree: usize, len: usize) -> Result<Vec<f64>> {
    match mode {
        TextureMode::Hermite => Ok(hermite_template(HermiteSpec { degree, length: len })?.vector),
        TextureMode::RandomGaussian { seed } => {
            // sorted, so the inner product with a sorted patch is the max filter
            let mut r = rng::substream(seed, (level_idx * 1024 + degree_idx) as u64);
            let mut v = rng::gaussian_vec(&mut r, len);
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
    }
}

/// Entry `(level, degree)` sums, over the `2^level`-side patches of the
/// image, the inner product of the ascending-sorted patch with the template
/// for `degree`. Levels form the outer loop.
pub fn texture_features(image: &Image, levels: &[usize], degrees: &[usize], mode: TextureMode) -> Result<Vec<f64>> {
    if levels.is_empty() || degrees.is_empty() {
        return Err(Error::InvalidInput("empty level or degree range".into()));
    }
    let side = image.side;
    if !side.is_power_of_two() {
        return Err(Error::InvalidInput(format!("image side {side} is not a power of two")));
    }
    check_finite("image", &image.pixels)?;
    let mut out = Vec::with_capacity(levels.len() * degrees.len());
    for (li, &level) in levels.iter().enumerate() {
        let p = 1usize.checked_shl(level as u32).filter(|&p| p <= side && level < 32).ok_or_else(|| {
            Error::InvalidInput(format!("patch side 2^{level} exceeds image side {side}"))
        })?;
        let len = p * p;
        let templates = degrees
            .iter()
            .enumerate()
            .map(|(di, &n)| texture_template(mode, li, di, n, len))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = vec![0.0; degrees.len()];
        let mut patch = Vec::with_capacity(len);
        for pr in 0..side / p {
            for pc in 0..side / p {
                patch.clear();
                for r in 0..p {
                    let row = (pr * p + r) * side + pc * p;
                    patch.extend_from_slice(&image.pixels[row..row + p]);
                }
                patch.sort_by(f64::total_cmp);
                for (a, t) in acc.iter_mut().zip(&templates) {
                    *a += crate::linalg::dot(&patch, t);
                }
            }
        }
        out.extend(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupAction;
    use crate::groups::complex::shift_conjugate_apply;
    use crate::groups::mf_sort_permutation;
    use crate::quotient_distance;

    #[test]
    fn square_embedding() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let e = district_embed(&sq, 4).unwrap();
        let expect = [(-0.125, -0.125), (0.125, -0.125), (0.125, 0.125), (-0.125, 0.125)];
        for (p, q) in e.0.iter().zip(expect) {
            assert!((p.re - q.0).abs() < 1e-15 && (p.im - q.1).abs() < 1e-15);
        }
        // rotate by 30 degrees, reflect, start at another corner
        let rot = Complex64::from_polar(1.0, 0.5236);
        let moved: Vec<[f64; 2]> = [2, 3, 0, 1]
            .iter()
            .map(|&i| {
                let p = rot * Complex64::new(sq[i][0], -sq[i][1]) * 3.0 + Complex64::new(5.0, -1.0);
                [p.re, p.im]
            })
            .collect();
        let f = district_embed(&moved, 4).unwrap();
        let g = GroupAction::ShiftAndConjugate { n: 4 };
        assert!(quotient_distance(&g, &e.to_real(), &f.to_real()).unwrap() < 1e-6);
    }

    #[test]
    fn embedding_is_centered_with_unit_perimeter() {
        let poly = [[0.0, 0.0], [4.0, 0.5], [3.0, 3.0], [1.0, 2.0], [-1.0, 1.0]];
        let e = district_embed(&poly, 50).unwrap();
        let c: Complex64 = e.0.iter().sum();
        assert!(c.norm() < 1e-9);
        let per: f64 = (0..50).map(|i| (e.0[(i + 1) % 50] - e.0[i]).norm()).sum();
        assert!((per - 1.0).abs() < 1e-9);
        assert!(district_embed(&[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], 8).is_err());
        // shifting the start vertex permutes samples only approximately, so
        // compare through the group
        let alt = shift_conjugate_apply(&e, 7, true, Complex64::from_polar(1.0, 2.0));
        let g = GroupAction::ShiftAndConjugate { n: 50 };
        assert!(quotient_distance(&g, &e.to_real(), &alt.to_real()).unwrap() < 1e-6);
    }

    #[test]
    fn lift_examples() {
        let x = MatrixSignal::from_rows(&[vec![1.0, 2.0, 4.0]]).unwrap();
        let l = ecg_lift(&x, 2).unwrap();
        assert_eq!(l.fiber(0, 0), &[-0.5, 0.5]);
        assert_eq!(l.fiber(0, 1), &[-1.0, 1.0]);
        let x = MatrixSignal::from_rows(&[vec![3.0; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0]]).unwrap();
        let l = ecg_lift(&x, 5).unwrap();
        assert_eq!(l.shape(), (2, 5, 1));
        assert_eq!(l.fiber(0, 0), &[0.0; 5]);
        assert_eq!(l.fiber(1, 0), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(ecg_lift(&x, 6).is_err());
    }

    #[test]
    fn texture_examples() {
        let pixels: Vec<f64> = (0..64).map(|i| ((i * 37) % 17) as f64 / 17.0).collect();
        let im = Image::new(8, pixels.clone()).unwrap();
        let f = texture_features(&im, &[1, 2, 3], &[0], TextureMode::Hermite).unwrap();
        let sum: f64 = pixels.iter().sum();
        for v in f {
            assert!((v - sum).abs() < 1e-12);
        }
        let flat = Image::new(8, vec![0.3; 64]).unwrap();
        for v in texture_features(&flat, &[1, 2, 3], &[1, 3], TextureMode::Hermite).unwrap() {
            assert!(v.abs() < 1e-12);
        }
        let small = Image::new(4, pixels[..16].to_vec()).unwrap();
        let f = texture_features(&small, &[2], &[0, 1], TextureMode::Hermite).unwrap();
        for (n, v) in [0, 1].into_iter().zip(f) {
            let t = hermite_template(HermiteSpec { degree: n, length: 16 }).unwrap().vector;
            let hand = mf_sort_permutation(&t, &small.pixels).unwrap().value;
            assert!((v - hand).abs() < 1e-12);
        }
        assert!(texture_features(&small, &[3], &[0], TextureMode::Hermite).is_err());
    }
}
