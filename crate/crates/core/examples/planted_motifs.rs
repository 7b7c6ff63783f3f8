//! Train two sliding-window templates and a linear classifier on noisy
//! recordings that each hide one of two motifs.

use maxfilt::pipeline::synthetic::{planted_motifs, PlantedSpec};
use maxfilt::pipeline::{fit_svm_pipeline, FeatureSpec, LabeledDataset, RawSample, SvmConfig};

fn dataset(per_class: usize, seed: u64) -> maxfilt::Result<LabeledDataset> {
    let spec = PlantedSpec { per_class, ..Default::default() };
    let (xs, ls) = planted_motifs(&spec, seed)?;
    LabeledDataset::new(xs.into_iter().map(RawSample::Recording).zip(ls).collect())
}

fn main() -> maxfilt::Result<()> {
    let train = dataset(40, 11)?;
    // same motifs, fresh noise and offsets
    let test = {
        let spec = PlantedSpec { per_class: 240, ..Default::default() };
        let (xs, ls) = planted_motifs(&spec, 11)?;
        LabeledDataset::new(xs.into_iter().map(RawSample::Recording).zip(ls).skip(80).collect())?
    };
    let cfg = SvmConfig { seed: 3, ..Default::default() };
    let (model, run) = fit_svm_pipeline(&train, FeatureSpec::Ecg { width: 8 }, 2, &cfg)?;
    println!("hinge loss {:.4} -> {:.4} ({} iterate)", run.initial_loss, run.final_loss, run.reported);
    println!("train accuracy {:.3}", model.accuracy(&train)?);
    println!("test accuracy  {:.3}", model.accuracy(&test)?);
    Ok(())
}
