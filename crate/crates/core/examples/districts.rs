//! Closed shapes compared up to rotation, reflection and starting vertex:
//! resample, filter with a shift-and-conjugate bank, then PCA and LDA.

use maxfilt::pipeline::synthetic::random_polygon;
use maxfilt::pipeline::{fit_lda_pipeline, FeatureSpec, LabeledDataset, LdaPipelineConfig, PipelineModel, RawSample};

/// Rotated, reflected and cyclically relabeled copies of a few base shapes.
fn shapes(per_class: usize, seed: u64) -> maxfilt::Result<LabeledDataset> {
    let mut out = Vec::new();
    for (c, vertices) in [5usize, 9].into_iter().enumerate() {
        let base = random_polygon(vertices, 100 + c as u64)?;
        for i in 0..per_class {
            let (s, co) = (0.37 * i as f64 + seed as f64).sin_cos();
            let mut p: Vec<[f64; 2]> = base.iter().map(|[x, y]| [co * x - s * y, s * x + co * y]).collect();
            p.rotate_left(i % vertices);
            if i % 2 == 1 {
                p.iter_mut().for_each(|v| v[1] = -v[1]);
                p.reverse();
            }
            // slight jitter so the copies are not identical up to the group
            let jitter = random_polygon(vertices, seed * 1000 + i as u64)?;
            for (v, j) in p.iter_mut().zip(&jitter) {
                v[0] += 0.03 * j[0];
                v[1] += 0.03 * j[1];
            }
            out.push((RawSample::Polygon { vertices: p }, format!("{vertices}-gon")));
        }
    }
    LabeledDataset::new(out)
}

fn main() -> maxfilt::Result<()> {
    let train = shapes(20, 1)?;
    let test = shapes(20, 2)?;
    let config = LdaPipelineConfig { pca_k: 10, n_templates: 30, seed: 4 };
    let model = fit_lda_pipeline(&train, FeatureSpec::District { n_samples: 64 }, &config)?;
    println!("train accuracy {:.3}, test accuracy {:.3}", model.accuracy(&train)?, model.accuracy(&test)?);
    // models round-trip through JSON
    let again = PipelineModel::from_json(&model.to_json()?)?;
    println!("reloaded model test accuracy {:.3}", again.accuracy(&test)?);
    Ok(())
}
