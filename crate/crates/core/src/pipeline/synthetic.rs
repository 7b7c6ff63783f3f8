//! Seeded synthetic datasets for the classification pipelines.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::MatrixSignal;
use crate::linalg;
use crate::pipeline::ingest::Image;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub per_class: usize,
    pub channels: usize,
    pub length: usize,
    pub width: usize,
    /// Standard deviation of the additive white noise.
    pub noise: f64,
    /// Norm of each planted motif.
    pub amplitude: f64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec { per_class: 40, channels: 2, length: 64, width: 8, noise: 0.3, amplitude: 4.0 }
    }
}

/// Recordings of white noise with one of two fixed motifs (mean-zero rows,
/// `channels x width`) added at a uniformly random offset. Labels are
/// `"motif_a"` and `"motif_b"`, interleaved.
pub fn planted_motifs(spec: &PlantedSpec, seed: u64) -> Result<(Vec<MatrixSignal>, Vec<String>)> {
    let PlantedSpec { per_class, channels: c, length: t, width: w, noise, amplitude } = *spec;
    if per_class == 0 || c == 0 || w < 2 || t < w {
        return Err(Error::InvalidInput("planted motifs need per_class >= 1, channels >= 1, 2 <= width <= length".into()));
    }
    // the motif pair depends on the seed's stream 0 only
    let mut mr = rng::substream(seed, 0);
    let mut motif = || {
        let mut m = rng::gaussian_vec(&mut mr, c * w);
        for row in m.chunks_mut(w) {
            let mean = row.iter().sum::<f64>() / w as f64;
            row.iter_mut().for_each(|v| *v -= mean);
        }
        let s = amplitude / linalg::norm(&m);
        m.iter_mut().for_each(|v| *v *= s);
        m
    };
    let motifs = [motif(), motif()];
    let mut signals = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for i in 0..2 * per_class {
        let class = i % 2;
        let mut r = rng::substream(seed, 1 + i as u64);
        let mut data: Vec<f64> = rng::gaussian_vec(&mut r, c * t).into_iter().map(|v| noise * v).collect();
        let at = rng::below(&mut r, t - w + 1);
        for ch in 0..c {
            for k in 0..w {
                data[ch * t + at + k] += motifs[class][ch * w + k];
            }
        }
        signals.push(MatrixSignal::new(c, t, data)?);
        labels.push(if class == 0 { "motif_a" } else { "motif_b" }.to_string());
    }
    Ok((signals, labels))
}

/// Stationary Gaussian field on a `side x side` torus: white noise smoothed
/// by a `(2 radius + 1)`-wide box filter in each direction, standardized,
/// then mapped to `0.5 + contrast * field` and clipped to `[0, 1]`.
pub fn gaussian_texture(side: usize, radius: usize, contrast: f64, seed: u64) -> Result<Image> {
    if side == 0 || 2 * radius + 1 > side {
        return Err(Error::InvalidInput("box filter wider than the image".into()));
    }
    let mut r = rng::seeded(seed);
    let noise = rng::gaussian_vec(&mut r, side * side);
    let blur = |src: &[f64], stride: usize, step: usize| -> Vec<f64> {
        let mut out = vec![0.0; src.len()];
        for line in 0..side {
            for i in 0..side {
                let mut acc = 0.0;
                for o in 0..=2 * radius {
                    let j = (i + side + o - radius) % side;
                    acc += src[line * stride + j * step];
                }
                out[line * stride + i * step] = acc;
            }
        }
        out
    };
    let field = blur(&blur(&noise, side, 1), 1, side);
    let scale = ((2 * radius + 1) * (2 * radius + 1)) as f64;
    let pixels = field.iter().map(|v| (0.5 + contrast * v / scale.sqrt()).clamp(0.0, 1.0)).collect();
    Image::new(side, pixels)
}

/// Two texture classes that differ in correlation length: box radius 0
/// (`"rough"`) versus `smooth_radius` (`"smooth"`), same contrast.
pub fn two_textures(per_class: usize, side: usize, smooth_radius: usize, seed: u64) -> Result<(Vec<Image>, Vec<String>)> {
    let mut images = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for i in 0..2 * per_class {
        let (radius, label) = if i % 2 == 0 { (0, "rough") } else { (smooth_radius, "smooth") };
        let sub = rng::substream(seed, i as u64).random::<u64>();
        images.push(gaussian_texture(side, radius, 0.15, sub)?);
        labels.push(label.to_string());
    }
    Ok((images, labels))
}

/// A star-shaped polygon with `vertices` corners at sorted random angles and
/// radii in `[0.5, 1.5]`.
pub fn random_polygon(vertices: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    if vertices < 3 {
        return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
    }
    let mut r = rng::seeded(seed);
    let mut angles: Vec<f64> = (0..vertices).map(|_| rng::uniform(&mut r) * std::f64::consts::TAU).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles
        .into_iter()
        .map(|a| {
            let rad = 0.5 + rng::uniform(&mut r);
            [rad * a.cos(), rad * a.sin()]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_shapes_and_balance() {
        let spec = PlantedSpec { per_class: 3, ..Default::default() };
        let (xs, ls) = planted_motifs(&spec, 9).unwrap();
        assert_eq!(xs.len(), 6);
        assert_eq!(xs[0].shape(), (2, 64));
        assert_eq!(ls.iter().filter(|l| *l == "motif_a").count(), 3);
        assert_eq!(planted_motifs(&spec, 9).unwrap().0, xs);
    }

    #[test]
    fn textures_are_in_range() {
        let im = gaussian_texture(16, 2, 0.15, 4).unwrap();
        assert!(im.pixels.iter().all(|p| (0.0..=1.0).contains(p)));
        let (ims, ls) = two_textures(2, 16, 2, 1).unwrap();
        assert_eq!(ims.len(), 4);
        assert_eq!(ls, ["rough", "smooth", "rough", "smooth"]);
    }
}
