//! Sorted-patch Hermite features, PCA and LDA on two synthetic Gaussian
//! textures, 8 training images per class.

use maxfilt::pipeline::synthetic::two_textures;
use maxfilt::pipeline::{fit_lda_pipeline, FeatureSpec, LabeledDataset, LdaPipelineConfig, RawSample, TextureMode};

fn dataset(per_class: usize, seed: u64) -> maxfilt::Result<LabeledDataset> {
    let (ims, ls) = two_textures(per_class, 64, 2, seed)?;
    LabeledDataset::new(ims.into_iter().map(RawSample::Image).zip(ls).collect())
}

fn main() -> maxfilt::Result<()> {
    let train = dataset(8, 1)?;
    let test = dataset(100, 2)?;
    let spec = FeatureSpec::Texture { levels: (2..=6).collect(), degrees: (0..=5).collect(), mode: TextureMode::Hermite };
    let model = fit_lda_pipeline(&train, spec, &LdaPipelineConfig::default())?;
    println!("features 30, pca k = {}", model.pca.as_ref().map_or(0, |p| p.k()));
    println!("test accuracy {:.3}", model.accuracy(&test)?);
    Ok(())
}
