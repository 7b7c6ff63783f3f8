//! Dataset readers: CSV vectors, binary PGM images, polygon JSON and
//! multichannel CSV recordings listed in a manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::MatrixSignal;

/// A square grayscale image, row-major, intensities in `[0, 1]` when read
/// from PGM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Image {
    pub side: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(side: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != side * side {
            return Err(Error::DimensionMismatch { expected: side * side, found: pixels.len() });
        }
        Ok(Image { side, pixels })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.side + c]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RawSample {
    Vector { values: Vec<f64> },
    Image(Image),
    Polygon { vertices: Vec<[f64; 2]> },
    Recording(MatrixSignal),
}

impl RawSample {
    fn shape(&self) -> String {
        match self {
            RawSample::Vector { values } => format!("vector[{}]", values.len()),
            RawSample::Image(im) => format!("image[{0}x{0}]", im.side),
            RawSample::Polygon { .. } => "polygon".into(),
            RawSample::Recording(m) => format!("recording{:?}", m.shape()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub samples: Vec<(RawSample, String)>,
    #[serde(default)]
    pub feature_matrix: Option<Vec<Vec<f64>>>,
}

impl LabeledDataset {
    pub fn new(samples: Vec<(RawSample, String)>) -> Result<Self> {
        if let Some((first, _)) = samples.first() {
            let shape = first.shape();
            if let Some((bad, _)) = samples.iter().find(|(s, _)| s.shape() != shape && !matches!(s, RawSample::Polygon { .. })) {
                return Err(Error::InvalidInput(format!(
                    "inconsistent sample shapes: {shape} vs {}",
                    bad.shape()
                )));
            }
        }
        Ok(LabeledDataset { samples, feature_matrix: None })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.samples.iter().map(|s| s.1.clone()).collect()
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<String> {
        let mut c = self.labels();
        c.sort();
        c.dedup();
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Pgm,
    PolygonJson,
    EcgCsv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "pgm" => Ok(Format::Pgm),
            "polygon_json" | "polygon-json" => Ok(Format::PolygonJson),
            "ecg_csv" | "ecg-csv" => Ok(Format::EcgCsv),
            _ => Err(Error::Parse(format!("unknown format `{s}`"))),
        }
    }
}

pub fn ingest(path: &Path, format: Format) -> Result<LabeledDataset> {
    match format {
        Format::Csv => read_csv(path),
        Format::Pgm => read_pgm_dataset(path),
        Format::PolygonJson => read_polygons(path),
        Format::EcgCsv => read_ecg_manifest(path),
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite("csv value"));
    }
    Ok(v)
}

/// Header row, one sample per row, last column the label. Either every other
/// column is numeric, or there is a single column holding a JSON array.
pub fn read_csv(path: &Path) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if rec.len() < 2 {
            return Err(Error::Parse(format!("row {}: need a value column and a label", line + 2)));
        }
        let label = rec[rec.len() - 1].trim().to_string();
        if label.is_empty() {
            return Err(Error::Parse(format!("row {}: empty label", line + 2)));
        }
        let first = rec[0].trim();
        let values = if rec.len() == 2 && first.starts_with('[') {
            let v: Vec<f64> = serde_json::from_str(first)
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
            if v.iter().any(|a| !a.is_finite()) {
                return Err(Error::NonFinite("csv value"));
            }
            v
        } else {
            (0..rec.len() - 1)
                .map(|i| parse_f64(&rec[i], &format!("row {}", line + 2)))
                .collect::<Result<Vec<f64>>>()?
        };
        samples.push((RawSample::Vector { values }, label));
    }
    LabeledDataset::new(samples)
}

/// Parses a binary (P5) 8-bit PGM into intensities in `[0, 1]`.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::Parse("not a binary PGM (P5)".into()));
    }
    let num = |t: String| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad PGM header field `{t}`")));
    let width = num(token()?)?;
    let height = num(token()?)?;
    let maxval = num(token()?)?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("unsupported PGM maxval {maxval}")));
    }
    if width != height || !width.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "PGM must be square with power-of-two side, got {width}x{height}"
        )));
    }
    let data = bytes
        .get(pos + 1..pos + 1 + width * height)
        .ok_or_else(|| Error::Parse("truncated PGM pixel data".into()))?;
    Image::new(width, data.iter().map(|&b| b as f64 / maxval as f64).collect())
}

/// Encodes intensities in `[0, 1]` as a binary PGM.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{0} {0}\n255\n", image.side).into_bytes();
    out.extend(image.pixels.iter().map(|&p| (p.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    v.sort();
    Ok(v)
}

/// A single PGM file, labeled by its parent directory, or a directory with
/// one subdirectory of `.pgm` files per class.
fn read_pgm_dataset(path: &Path) -> Result<LabeledDataset> {
    let label_of = |p: &Path| {
        p.parent()
            .and_then(|d| d.file_name())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "unlabeled".into())
    };
    if path.is_file() {
        let im = parse_pgm(&fs::read(path)?)?;
        return LabeledDataset::new(vec![(RawSample::Image(im), label_of(path))]);
    }
    let mut samples = Vec::new();
    for class_dir in sorted_entries(path)?.into_iter().filter(|p| p.is_dir()) {
        for file in sorted_entries(&class_dir)? {
            if file.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
                let im = parse_pgm(&fs::read(&file)?)
                    .map_err(|e| Error::Parse(format!("{}: {e}", file.display())))?;
                samples.push((RawSample::Image(im), label_of(&file)));
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput(format!("no PGM files under {}", path.display())));
    }
    LabeledDataset::new(samples)
}

#[derive(Deserialize)]
struct PolygonJson {
    label: String,
    vertices: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolygonFile {
    One(PolygonJson),
    Many(Vec<PolygonJson>),
}

fn read_polygons(path: &Path) -> Result<LabeledDataset> {
    let file: PolygonFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let polys = match file {
        PolygonFile::One(p) => vec![p],
        PolygonFile::Many(v) => v,
    };
    let samples = polys
        .into_iter()
        .map(|p| {
            if p.vertices.len() < 3 {
                return Err(Error::InvalidInput(format!("polygon `{}` has < 3 vertices", p.label)));
            }
            if p.vertices.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("polygon vertex"));
            }
            Ok((RawSample::Polygon { vertices: p.vertices }, p.label))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(samples)
}

#[derive(Deserialize)]
struct ManifestEntry {
    file: PathBuf,
    label: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Manifest {
    Wrapped { samples: Vec<ManifestEntry> },
    Bare(Vec<ManifestEntry>),
}

/// `c` header-less rows of `t` comma-separated values.
pub fn read_recording(path: &Path) -> Result<MatrixSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(|s| parse_f64(s, &path.display().to_string())).collect::<Result<Vec<f64>>>()?);
    }
    MatrixSignal::from_rows(&rows)
}

fn read_ecg_manifest(path: &Path) -> Result<LabeledDataset> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(path)?)?;
    let entries = match manifest {
        Manifest::Wrapped { samples } => samples,
        Manifest::Bare(v) => v,
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let samples = entries
        .into_iter()
        .map(|e| Ok((RawSample::Recording(read_recording(&base.join(&e.file))?), e.label)))
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(samples)
}
