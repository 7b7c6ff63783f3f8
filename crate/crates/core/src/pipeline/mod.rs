//! End-to-end invariant classification: ingest, feature extraction, PCA,
//! LDA or jointly trained hinge-loss templates, and a versioned model file.

pub mod features;
pub mod ingest;
pub mod learn;
pub mod synthetic;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::filter_bank_vectors;
use crate::group::GroupAction;
use crate::templates::{random_sphere_templates, Template};

pub use features::{district_embed, ecg_lift, texture_features, TextureMode};
pub use ingest::{ingest, Format, Image, LabeledDataset, RawSample};
pub use learn::{lda_fit, lda_predict, pca_fit, train_svm_templates, Lda, Pca, Svm, SvmConfig, SvmTraining};

pub const MODEL_VERSION: &str = "maxfilt-model/1";

/// How a raw sample becomes a feature vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSpec {
    /// Vectors through a filter bank over `group` (a compact group spec).
    Bank { group: String },
    /// Polygons resampled at `n_samples` points, then a shift-and-conjugate
    /// filter bank.
    District { n_samples: usize },
    /// Recordings lifted to windows of `width`, then a sliding-window bank.
    Ecg { width: usize },
    /// Sorted-patch statistics of square images; no templates.
    Texture { levels: Vec<usize>, degrees: Vec<usize>, mode: TextureMode },
}

impl FeatureSpec {
    /// The group and the flat input vector for `raw`, for bank-type specs.
    pub fn lift(&self, raw: &RawSample) -> Result<(GroupAction, Vec<f64>)> {
        match (self, raw) {
            (FeatureSpec::Bank { group }, RawSample::Vector { values }) => Ok((group.parse()?, values.clone())),
            (FeatureSpec::District { n_samples }, RawSample::Polygon { vertices }) => Ok((
                GroupAction::ShiftAndConjugate { n: *n_samples },
                district_embed(vertices, *n_samples)?.to_real(),
            )),
            (FeatureSpec::Ecg { width }, RawSample::Recording(m)) => {
                let t = ecg_lift(m, *width)?;
                let (channels, width, positions) = t.shape();
                Ok((GroupAction::SlidingWindowShift { channels, width, positions }, t.into_vec()))
            }
            (spec, raw) => Err(Error::InvalidInput(format!(
                "feature spec {spec:?} does not apply to a {} sample",
                raw_kind(raw)
            ))),
        }
    }

    pub fn extract(&self, templates: &[Vec<f64>], raw: &RawSample) -> Result<Vec<f64>> {
        match (self, raw) {
            (FeatureSpec::Texture { levels, degrees, mode }, RawSample::Image(im)) => {
                texture_features(im, levels, degrees, *mode)
            }
            _ => {
                let (g, x) = self.lift(raw)?;
                filter_bank_vectors(&g, templates, &x)
            }
        }
    }

    pub fn extract_all(&self, templates: &[Vec<f64>], data: &LabeledDataset) -> Result<Vec<Vec<f64>>> {
        data.samples.par_iter().map(|(raw, _)| self.extract(templates, raw)).collect()
    }
}

fn raw_kind(raw: &RawSample) -> &'static str {
    match raw {
        RawSample::Vector { .. } => "vector",
        RawSample::Image(_) => "image",
        RawSample::Polygon { .. } => "polygon",
        RawSample::Recording(_) => "recording",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Lda(Lda),
    Svm(Svm),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineModel {
    pub version: String,
    pub features: FeatureSpec,
    pub templates: Vec<Template>,
    pub pca: Option<Pca>,
    pub classifier: Classifier,
    /// Settings the model was fit with.
    pub config: serde_json::Value,
}

impl PipelineModel {
    fn template_vectors(&self) -> Vec<Vec<f64>> {
        self.templates.iter().map(|t| t.vector.clone()).collect()
    }

    pub fn predict(&self, raw: &RawSample) -> Result<String> {
        let mut f = self.features.extract(&self.template_vectors(), raw)?;
        if let Some(p) = &self.pca {
            f = p.project(&f)?;
        }
        match &self.classifier {
            Classifier::Lda(m) => lda_predict(m, &f),
            Classifier::Svm(s) => s.predict(&f),
        }
    }

    /// Fraction of samples whose prediction matches the label.
    pub fn accuracy(&self, data: &LabeledDataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::InvalidInput("empty dataset".into()));
        }
        let hits = data
            .samples
            .par_iter()
            .map(|(raw, label)| self.predict(raw).map(|p| usize::from(p == *label)))
            .collect::<Result<Vec<_>>>()?;
        Ok(hits.iter().sum::<usize>() as f64 / data.len() as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: PipelineModel = serde_json::from_str(text)?;
        if m.version != MODEL_VERSION {
            return Err(Error::Parse(format!("unsupported model version `{}`", m.version)));
        }
        Ok(m)
    }
}

/// Settings for [`fit_lda_pipeline`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaPipelineConfig {
    /// Requested PCA dimension; clamped to `min(N - 1, F)`. `0` skips PCA.
    pub pca_k: usize,
    /// Random unit templates for bank-type features.
    pub n_templates: usize,
    pub seed: u64,
}

impl Default for LdaPipelineConfig {
    fn default() -> Self {
        LdaPipelineConfig { pca_k: 25, n_templates: 100, seed: 0 }
    }
}

/// Features, then PCA, then LDA. Bank-type features use random unit
/// templates of the lifted dimension.
pub fn fit_lda_pipeline(data: &LabeledDataset, spec: FeatureSpec, config: &LdaPipelineConfig) -> Result<PipelineModel> {
    let first = &data.samples.first().ok_or_else(|| Error::InvalidInput("empty dataset".into()))?.0;
    let templates = match spec {
        FeatureSpec::Texture { .. } => Vec::new(),
        _ => {
            let (g, _) = spec.lift(first)?;
            random_sphere_templates(config.n_templates, g.dim(), config.seed)?
                .into_iter()
                .map(|t| t.bind(&g))
                .collect()
        }
    };
    let vecs: Vec<Vec<f64>> = templates.iter().map(|t: &Template| t.vector.clone()).collect();
    let mut feats = spec.extract_all(&vecs, data)?;
    let f = feats[0].len();
    let k = config.pca_k.min(data.len().saturating_sub(1)).min(f);
    let pca = if k > 0 {
        let p = pca_fit(&feats, k)?;
        feats = feats.iter().map(|x| p.project(x)).collect::<Result<_>>()?;
        Some(p)
    } else {
        None
    };
    let lda = lda_fit(&feats, &data.labels())?;
    Ok(PipelineModel {
        version: MODEL_VERSION.into(),
        features: spec,
        templates,
        pca,
        classifier: Classifier::Lda(lda),
        config: serde_json::to_value(config)?,
    })
}

/// Jointly trained templates and binary linear classifier on bank-type
/// features (`Bank` or `Ecg`).
pub fn fit_svm_pipeline(
    data: &LabeledDataset,
    spec: FeatureSpec,
    n_templates: usize,
    config: &SvmConfig,
) -> Result<(PipelineModel, SvmTraining)> {
    if matches!(spec, FeatureSpec::Texture { .. }) {
        return Err(Error::InvalidInput("texture features have no templates to train".into()));
    }
    let lifted = data.samples.par_iter().map(|(raw, _)| spec.lift(raw)).collect::<Result<Vec<_>>>()?;
    let group = lifted.first().ok_or_else(|| Error::InvalidInput("empty dataset".into()))?.0.clone();
    if lifted.iter().any(|(g, _)| *g != group) {
        return Err(Error::InvalidInput("samples lift to different groups".into()));
    }
    let xs: Vec<Vec<f64>> = lifted.into_iter().map(|(_, x)| x).collect();
    let run = train_svm_templates(&xs, &data.labels(), &group, n_templates, config)?;
    let templates = run
        .templates
        .iter()
        .enumerate()
        .map(|(i, v)| Template::new(v.clone(), format!("trained-{i}")).bind(&group))
        .collect();
    let model = PipelineModel {
        version: MODEL_VERSION.into(),
        features: spec,
        templates,
        pca: None,
        classifier: Classifier::Svm(run.svm.clone()),
        config: serde_json::json!({ "n_templates": n_templates, "svm": config }),
    };
    Ok((model, run))
}
