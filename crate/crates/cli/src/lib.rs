//! Command-line front end for the `maxfilt` library.
//!
//! Every command prints one JSON report (or a plain table) holding the seed,
//! the crate version, a hash of the command's configuration, and a
//! `result` object. Exit codes: 0 ok, 2 I/O or parse failure, 3 invalid
//! input, 4 oracle mismatch, 5 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use maxfilt::analysis::{
    band_limited_signal, diffeo_stability_experiment, estimate_lipschitz, gaussian_bump, separation_test,
    stability_sweep, theil_sen_slope, unit_bank, SamplerSpec, SeparationPairs, WarpSpec,
};
use maxfilt::graphs::{graph_isomorphism_certificate, make_color_coding_scaled, mf_tree_dp, TreeTemplate, WeightedGraph};
use maxfilt::pipeline::synthetic::{planted_motifs, random_polygon, two_textures, PlantedSpec};
use maxfilt::pipeline::{
    self, fit_lda_pipeline, fit_svm_pipeline, ingest, pca_fit, FeatureSpec, Format, LabeledDataset,
    LdaPipelineConfig, PipelineModel, SvmConfig, TextureMode,
};
use maxfilt::templates::{
    bilipschitz_parameters, circulant_from_taps, gmm_classifier, hermite_template, indicator_templates,
    random_sphere_templates, HermiteSpec,
};
use maxfilt::{brute_force_max_filter, max_filter, EnumeratedGroup, GroupAction, Template};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "maxfilt", version, about = "Group-invariant max filtering")]
pub struct Cli {
    /// Seed for every random choice; required by stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Max filter of a template (or bank) against one input vector.
    Filter(FilterArgs),
    /// Tree template against a weighted graph by color coding.
    GraphFilter(GraphFilterArgs),
    /// Generate templates or template parameters.
    Templates(TemplatesArgs),
    /// Empirical Lipschitz bounds of a random filter bank.
    Lipschitz(LipschitzArgs),
    /// Count distinct-orbit pairs a filter bank fails to separate.
    Separation(SeparationArgs),
    /// Max filter change under small warps of a 1-D signal.
    Stability(StabilityArgs),
    /// Fit a classification pipeline and write the model.
    Train(TrainArgs),
    /// Apply a saved model to a dataset.
    Predict(PredictArgs),
    /// Embed polygons, filter with random templates, project by PCA.
    District(DistrictArgs),
    /// Sorted-patch texture features of PGM images.
    Texture(TextureArgs),
    /// Write a synthetic dataset to disk.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct FilterArgs {
    /// Group spec such as `cyclic:64`, or `@file.json` for an enumerated group.
    #[arg(long)]
    pub group: String,
    /// JSON number array, template object, or a list of either.
    #[arg(long)]
    pub template: PathBuf,
    /// JSON number array.
    #[arg(long)]
    pub input: PathBuf,
    /// Cross-check against the brute-force oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GraphFilterArgs {
    /// Tree JSON `{"n": k, "edges": [[u, v, w], ...]}`.
    #[arg(long)]
    pub tree: PathBuf,
    /// Graph JSON in the same format.
    #[arg(long)]
    pub graph: PathBuf,
    /// Also decide isomorphism between `--graph` and this graph.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Scale of the color coding family relative to `k e^k ln n`.
    #[arg(long, default_value_t = 1.0)]
    pub coding_multiplier: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct TemplatesArgs {
    /// Discretized Hermite template `p_n(Q(i / (d + 1)))`.
    #[arg(long, conflicts_with_all = ["random", "indicator", "gmm", "bilipschitz"])]
    pub hermite: bool,
    /// Uniform random unit templates.
    #[arg(long, conflicts_with_all = ["indicator", "gmm", "bilipschitz"])]
    pub random: bool,
    /// Indicator-set templates on a cyclic grid; sets from `--sets`.
    #[arg(long, conflicts_with_all = ["gmm", "bilipschitz"])]
    pub indicator: bool,
    /// Template and threshold separating two circulant Gaussians.
    #[arg(long, conflicts_with = "bilipschitz")]
    pub gmm: bool,
    /// Bank size and margin guaranteeing bilipschitz features.
    #[arg(long)]
    pub bilipschitz: bool,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Group order for `--bilipschitz`.
    #[arg(long)]
    pub order: Option<usize>,
    /// JSON list of index lists.
    #[arg(long)]
    pub sets: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a_taps: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b_taps: Vec<f64>,
    /// Signal length for `--gmm`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Required Thompson distance for `--gmm`.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LipschitzArgs {
    #[arg(long)]
    pub group: String,
    /// Number of random unit templates.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Template file instead of random templates.
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.5)]
    pub near_fraction: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SeparationArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long)]
    pub bank: Option<PathBuf>,
    /// Use the `d` templates `z_j = e_1 + ... + e_j` instead.
    #[arg(long)]
    pub prefix: bool,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.5)]
    pub near_fraction: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, default_value_t = 20)]
    pub warps: usize,
    #[arg(long, default_value_t = 0.01)]
    pub min_jacobian: f64,
    #[arg(long, default_value_t = 0.5)]
    pub max_jacobian: f64,
    /// Sine modes per warp.
    #[arg(long, default_value_t = 3)]
    pub modes: usize,
    /// Width of the unit-norm Gaussian bump template, in grid cells.
    #[arg(long, default_value_t = 4.0)]
    pub width: f64,
    /// Highest frequency of the random signal.
    #[arg(long, default_value_t = 6)]
    pub max_freq: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lda,
    Svm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Csv,
    Pgm,
    PolygonJson,
    EcgCsv,
}

impl From<InputFormat> for Format {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Csv => Format::Csv,
            InputFormat::Pgm => Format::Pgm,
            InputFormat::PolygonJson => Format::PolygonJson,
            InputFormat::EcgCsv => Format::EcgCsv,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FeatureArgs {
    /// Group spec for CSV vectors.
    #[arg(long)]
    pub group: Option<String>,
    /// Window width for recordings.
    #[arg(long, default_value_t = 30)]
    pub width: usize,
    /// Boundary samples per polygon.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Patch levels for images, e.g. `2..8` or `2,4,6`.
    #[arg(long, default_value = "2..8")]
    pub levels: String,
    /// Hermite degrees for images.
    #[arg(long, default_value = "0..5")]
    pub degrees: String,
    /// Literal random Gaussian templates instead of Hermite ones.
    #[arg(long)]
    pub random_templates: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: InputFormat,
    #[arg(long, value_enum, default_value_t = Method::Lda)]
    pub method: Method,
    #[command(flatten)]
    pub features: FeatureArgs,
    /// Templates: random ones for LDA, trained ones for SVM.
    #[arg(long)]
    pub templates: Option<usize>,
    #[arg(long, default_value_t = 25)]
    pub pca_k: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eta0: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub rho: f64,
    /// Where to write the model JSON.
    #[arg(long)]
    pub model_out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: InputFormat,
}

#[derive(Args, Debug, Serialize)]
pub struct DistrictArgs {
    /// polygon_json file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub templates: usize,
    #[arg(long, default_value_t = 2)]
    pub components: usize,
    /// Also write `label,pc1,pc2,...` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TextureArgs {
    /// A PGM file or a directory of class subdirectories.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value = "2..8")]
    pub levels: String,
    #[arg(long, default_value = "0..5")]
    pub degrees: String,
    #[arg(long)]
    pub random_templates: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    /// Two-motif recordings plus an ecg_csv manifest.
    Planted,
    /// Two classes of Gaussian texture PGMs.
    Textures,
    /// Random star-shaped polygons with 5 or 12 corners.
    Polygons,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub kind: SynthKind,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub per_class: usize,
    /// Image side for textures.
    #[arg(long, default_value_t = 64)]
    pub side: usize,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(3, message)
    }
}

impl From<maxfilt::Error> for CliError {
    fn from(e: maxfilt::Error) -> Self {
        use maxfilt::Error as E;
        let code = match e {
            E::Io(_) | E::Json(_) | E::Parse(_) => 2,
            E::NotPositiveDefinite(_) | E::Numeric(_) => 5,
            _ => 3,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(2, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(2, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return 3;
        }
        // the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match execute(&cli).and_then(|report| emit(&cli, &report)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Builds the report for `cli` without printing it.
pub fn execute(cli: &Cli) -> CliResult<Value> {
    let seed = cli.seed;
    let need_seed = || seed.ok_or_else(|| CliError::invalid("this command needs --seed"));
    let result = match &cli.command {
        Command::Filter(a) => cmd_filter(a)?,
        Command::GraphFilter(a) => cmd_graph_filter(a, need_seed()?)?,
        Command::Templates(a) => cmd_templates(a, seed)?,
        Command::Lipschitz(a) => cmd_lipschitz(a, need_seed()?)?,
        Command::Separation(a) => cmd_separation(a, need_seed()?)?,
        Command::Stability(a) => cmd_stability(a, need_seed()?)?,
        Command::Train(a) => cmd_train(a, need_seed()?)?,
        Command::Predict(a) => cmd_predict(a)?,
        Command::District(a) => cmd_district(a, need_seed()?)?,
        Command::Texture(a) => cmd_texture(a, seed)?,
        Command::Synth(a) => cmd_synth(a, need_seed()?)?,
    };
    Ok(report(&cli.command, seed, result))
}

fn command_name(c: &Command) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_object().and_then(|o| o.keys().next().cloned()))
        .unwrap_or_default()
}

/// Hex SHA-256 prefix of the command, its arguments and the seed.
pub fn config_hash(command: &Command, seed: Option<u64>) -> String {
    let canonical = json!({ "command": command, "seed": seed }).to_string();
    Sha256::digest(canonical.as_bytes()).iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn report(command: &Command, seed: Option<u64>, result: Value) -> Value {
    json!({
        "command": command_name(command),
        "seed": seed,
        "version": VERSION,
        "config_hash": config_hash(command, seed),
        "result": result,
    })
}

fn render_table(report: &Value) -> String {
    let mut out = String::new();
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    };
    for key in ["command", "seed", "version", "config_hash"] {
        let _ = writeln!(out, "{key:<24}{}", scalar(&report[key]));
    }
    match &report["result"] {
        Value::Object(m) => {
            for (k, v) in m {
                let _ = writeln!(out, "{k:<24}{}", scalar(v));
            }
        }
        other => {
            let _ = writeln!(out, "{:<24}{}", "result", scalar(other));
        }
    }
    out
}

fn emit(cli: &Cli, report: &Value) -> CliResult<()> {
    let text = match cli.format {
        OutputFormat::Json => serde_json::to_string_pretty(report)? + "\n",
        OutputFormat::Table => render_table(report),
    };
    match &cli.output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new(2, format!("{}: {e}", path.display())))
}

pub fn parse_group(spec: &str) -> CliResult<GroupAction> {
    match spec.strip_prefix('@') {
        Some(path) => Ok(GroupAction::Enumerated(EnumeratedGroup::from_json(&read(Path::new(path))?)?)),
        None => Ok(spec.parse()?),
    }
}

fn vector_of(v: &Value) -> CliResult<Vec<f64>> {
    let bad = || CliError::new(2, "expected a number array or a template object");
    let arr = match v {
        Value::Object(o) => o.get("vector").ok_or_else(bad)?,
        other => other,
    };
    arr.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|x| x.as_f64().ok_or_else(bad))
        .collect()
}

/// One vector, one template, or a list of either.
pub fn read_vectors(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let v: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::new(2, format!("{}: {e}", path.display())))?;
    match &v {
        Value::Array(items) if items.iter().any(|i| i.is_array() || i.is_object()) => {
            items.iter().map(vector_of).collect()
        }
        _ => Ok(vec![vector_of(&v)?]),
    }
}

/// `a..b` (inclusive), `a..=b`, or a comma list.
pub fn parse_range(s: &str) -> CliResult<Vec<usize>> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::invalid(format!("bad range `{s}`")));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(CliError::invalid(format!("empty range `{s}`")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

pub fn cmd_filter(a: &FilterArgs) -> CliResult<Value> {
    let group = parse_group(&a.group)?;
    let bank = read_vectors(&a.template)?;
    let xs = read_vectors(&a.input)?;
    let [x] = xs.as_slice() else {
        return Err(CliError::invalid("--input must hold a single vector"));
    };
    let mut results = Vec::with_capacity(bank.len());
    for z in &bank {
        let r = max_filter(&group, z, x)?;
        let mut entry = serde_json::to_value(&r)?;
        if a.oracle {
            let o = brute_force_max_filter(&group, z, x)?;
            let scale = 1.0 + r.value.abs();
            let ok = if o.approximate {
                o.value <= r.value + 1e-9 * scale && r.value - o.value <= 1e-5 * scale
            } else {
                (o.value - r.value).abs() <= 1e-9 * scale
            };
            if !ok {
                return Err(CliError::new(
                    4,
                    format!("oracle mismatch: specialized {} vs brute force {}", r.value, o.value),
                ));
            }
            entry["oracle_value"] = json!(o.value);
        }
        results.push(entry);
    }
    Ok(if results.len() == 1 {
        results.pop().expect("one result")
    } else {
        json!({ "features": results.iter().map(|r| r["value"].clone()).collect::<Vec<_>>(), "filters": results })
    })
}

pub fn cmd_graph_filter(a: &GraphFilterArgs, seed: u64) -> CliResult<Value> {
    let tree: TreeTemplate = serde_json::from_str(&read(&a.tree)?)?;
    // any labeling is accepted; the value does not depend on it
    let (tree, _) = tree.post_ordered();
    let graph = WeightedGraph::from_json(&read(&a.graph)?)?;
    let coding = make_color_coding_scaled(graph.n(), tree.k(), seed, a.coding_multiplier)?;
    let r = mf_tree_dp(&tree, &graph, &coding)?;
    let mut out = json!({
        "value": r.value,
        "pairs": r.pairs,
        "ops": r.ops,
        "coding_size": coding.colorings.len(),
        "coding_verified": coding.verified,
    });
    if let Some(p) = &a.compare {
        let other = WeightedGraph::from_json(&read(p)?)?;
        out["isomorphism"] = serde_json::to_value(graph_isomorphism_certificate(&graph, &other)?)?;
    }
    Ok(out)
}

pub fn cmd_templates(a: &TemplatesArgs, seed: Option<u64>) -> CliResult<Value> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| CliError::invalid(format!("missing --{name}")));
    if a.hermite {
        let t = hermite_template(HermiteSpec { degree: need(a.degree, "degree")?, length: need(a.dim, "dim")? })?;
        return Ok(json!({ "templates": [t] }));
    }
    if a.random {
        let seed = seed.ok_or_else(|| CliError::invalid("--random needs --seed"))?;
        let ts = random_sphere_templates(need(a.count, "count")?, need(a.dim, "dim")?, seed)?;
        return Ok(json!({ "templates": ts }));
    }
    if a.indicator {
        let path = a.sets.as_ref().ok_or_else(|| CliError::invalid("missing --sets"))?;
        let sets: Vec<Vec<usize>> = serde_json::from_str(&read(path)?)?;
        let ts: Vec<Template> = indicator_templates(&sets, need(a.grid, "grid")?)?;
        return Ok(json!({ "templates": ts }));
    }
    if a.gmm {
        let n = need(a.n, "n")?;
        let c = a.c.ok_or_else(|| CliError::invalid("missing --c"))?;
        if a.a_taps.is_empty() || a.b_taps.is_empty() {
            return Err(CliError::invalid("--gmm needs --a-taps and --b-taps"));
        }
        let g = gmm_classifier(&circulant_from_taps(&a.a_taps, n)?, &circulant_from_taps(&a.b_taps, n)?, c)?;
        return Ok(json!({ "classifier": g }));
    }
    if a.bilipschitz {
        let (n_min, delta) = bilipschitz_parameters(need(a.order, "order")?, need(a.dim, "dim")?)?;
        return Ok(json!({ "n_min": n_min, "delta": delta }));
    }
    Err(CliError::invalid("choose one of --hermite, --random, --indicator, --gmm, --bilipschitz"))
}

fn bank_for(group: &GroupAction, n: usize, bank: &Option<PathBuf>, seed: u64) -> CliResult<Vec<Vec<f64>>> {
    match bank {
        Some(p) => read_vectors(p),
        None if n == 0 => Err(CliError::invalid("--n must be positive")),
        None => Ok(unit_bank(n, group.dim(), seed)),
    }
}

fn sampler(samples: usize, near_fraction: f64, epsilon: f64) -> CliResult<SamplerSpec> {
    if !(0.0..=1.0).contains(&near_fraction) || !(epsilon > 0.0) || samples == 0 {
        return Err(CliError::invalid("need samples > 0, near_fraction in [0, 1], epsilon > 0"));
    }
    Ok(SamplerSpec { samples, near_fraction, epsilon })
}

// templates and pairs come from disjoint seed families
const BANK_STREAM: u64 = 0x6261_6e6b;

pub fn cmd_lipschitz(a: &LipschitzArgs, seed: u64) -> CliResult<Value> {
    let group = parse_group(&a.group)?;
    let bank = bank_for(&group, a.n, &a.bank, seed ^ BANK_STREAM)?;
    let r = estimate_lipschitz(&group, &bank, &sampler(a.samples, a.near_fraction, a.epsilon)?, seed)?;
    Ok(serde_json::to_value(r)?)
}

pub fn cmd_separation(a: &SeparationArgs, seed: u64) -> CliResult<Value> {
    let group = parse_group(&a.group)?;
    let bank = if a.prefix {
        let d = group.dim();
        (1..=d).map(|j| (0..d).map(|i| if i < j { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        bank_for(&group, a.n, &a.bank, seed ^ BANK_STREAM)?
    };
    let pairs = SeparationPairs::Random {
        trials: a.trials,
        sampler: sampler(a.trials, a.near_fraction, a.epsilon)?,
    };
    let r = separation_test(&group, &bank, &pairs, seed)?;
    Ok(json!({ "templates": bank.len(), "report": r }))
}

pub fn cmd_stability(a: &StabilityArgs, seed: u64) -> CliResult<Value> {
    if a.warps < 2 || !(a.min_jacobian > 0.0 && a.min_jacobian <= a.max_jacobian) {
        return Err(CliError::invalid("need warps >= 2 and 0 < min_jacobian <= max_jacobian"));
    }
    let mut h = gaussian_bump(a.grid, a.width);
    let nh = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    h.iter_mut().for_each(|v| *v /= nh);
    let f = band_limited_signal(a.grid, a.max_freq, seed);
    let jacs: Vec<f64> = (0..a.warps)
        .map(|i| a.min_jacobian + (a.max_jacobian - a.min_jacobian) * i as f64 / (a.warps - 1) as f64)
        .collect();
    let rows = stability_sweep(&h, &f, &jacs, a.modes, seed.wrapping_add(1))?;
    let xs: Vec<f64> = rows.iter().map(|r| r.distortion_size).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let slope = theil_sen_slope(&xs, &ys);
    let base = max_filter(&GroupAction::CyclicShift { n: a.grid }, &h, &f)?.value;
    let shift = diffeo_stability_experiment(&h, &f, &WarpSpec::translation((a.grid / 3) as f64))?;
    Ok(json!({
        "warps": rows,
        "theil_sen_slope": slope,
        "shift_gap_relative": shift.filter_gap / base.abs().max(f64::MIN_POSITIVE),
    }))
}

fn load(path: &Path, format: InputFormat) -> CliResult<LabeledDataset> {
    Ok(ingest(path, format.into())?)
}

fn feature_spec(format: InputFormat, a: &FeatureArgs, seed: u64) -> CliResult<FeatureSpec> {
    Ok(match format {
        InputFormat::Csv => FeatureSpec::Bank {
            group: a.group.clone().ok_or_else(|| CliError::invalid("csv data needs --group"))?,
        },
        InputFormat::PolygonJson => FeatureSpec::District { n_samples: a.samples },
        InputFormat::EcgCsv => FeatureSpec::Ecg { width: a.width },
        InputFormat::Pgm => FeatureSpec::Texture {
            levels: parse_range(&a.levels)?,
            degrees: parse_range(&a.degrees)?,
            mode: if a.random_templates { TextureMode::RandomGaussian { seed } } else { TextureMode::Hermite },
        },
    })
}

pub fn cmd_train(a: &TrainArgs, seed: u64) -> CliResult<Value> {
    let data = load(&a.data, a.input_format)?;
    let spec = feature_spec(a.input_format, &a.features, seed)?;
    let (model, extra) = match a.method {
        Method::Lda => {
            let cfg = LdaPipelineConfig { pca_k: a.pca_k, n_templates: a.templates.unwrap_or(100), seed };
            (fit_lda_pipeline(&data, spec, &cfg)?, Value::Null)
        }
        Method::Svm => {
            let cfg = SvmConfig { epochs: a.epochs, eta0: a.eta0, rho: a.rho, train_templates: true, seed };
            let (m, run) = fit_svm_pipeline(&data, spec, a.templates.unwrap_or(2), &cfg)?;
            let extra = json!({
                "initial_loss": run.initial_loss,
                "final_loss": run.final_loss,
                "reported_iterate": run.reported,
            });
            (m, extra)
        }
    };
    fs::write(&a.model_out, model.to_json()?)?;
    Ok(json!({
        "model": a.model_out.display().to_string(),
        "samples": data.len(),
        "classes": data.classes(),
        "train_accuracy": model.accuracy(&data)?,
        "training": extra,
    }))
}

pub fn cmd_predict(a: &PredictArgs) -> CliResult<Value> {
    let model = PipelineModel::from_json(&read(&a.model)?)?;
    let data = load(&a.data, a.input_format)?;
    let predictions = data
        .samples
        .iter()
        .map(|(raw, _)| model.predict(raw))
        .collect::<maxfilt::Result<Vec<_>>>()?;
    let hits = predictions.iter().zip(data.labels()).filter(|(p, l)| *p == l).count();
    Ok(json!({
        "predictions": predictions,
        "labels": data.labels(),
        "accuracy": hits as f64 / data.len().max(1) as f64,
    }))
}

pub fn cmd_district(a: &DistrictArgs, seed: u64) -> CliResult<Value> {
    let data = load(&a.data, InputFormat::PolygonJson)?;
    let spec = FeatureSpec::District { n_samples: a.samples };
    let bank: Vec<Vec<f64>> =
        random_sphere_templates(a.templates, 2 * a.samples, seed)?.into_iter().map(|t| t.vector).collect();
    let feats = spec.extract_all(&bank, &data)?;
    let pca = pca_fit(&feats, a.components)?;
    let coords = feats.iter().map(|f| pca.project(f)).collect::<maxfilt::Result<Vec<_>>>()?;
    if let Some(p) = &a.csv {
        let mut text = String::from("label");
        for j in 1..=a.components {
            let _ = write!(text, ",pc{j}");
        }
        text.push('\n');
        for ((_, label), c) in data.samples.iter().zip(&coords) {
            text.push_str(label);
            for v in c {
                let _ = write!(text, ",{v}");
            }
            text.push('\n');
        }
        fs::write(p, text)?;
    }
    Ok(json!({
        "labels": data.labels(),
        "coordinates": coords,
        "explained_variance": pca.variances,
    }))
}

pub fn cmd_texture(a: &TextureArgs, seed: Option<u64>) -> CliResult<Value> {
    let mode = if a.random_templates {
        TextureMode::RandomGaussian { seed: seed.ok_or_else(|| CliError::invalid("--random-templates needs --seed"))? }
    } else {
        TextureMode::Hermite
    };
    let data = load(&a.image, InputFormat::Pgm)?;
    let spec = FeatureSpec::Texture { levels: parse_range(&a.levels)?, degrees: parse_range(&a.degrees)?, mode };
    let feats = spec.extract_all(&[], &data)?;
    Ok(json!({ "labels": data.labels(), "features": feats }))
}

pub fn cmd_synth(a: &SynthArgs, seed: u64) -> CliResult<Value> {
    fs::create_dir_all(&a.out)?;
    let mut written = Vec::new();
    match a.kind {
        SynthKind::Planted => {
            let spec = PlantedSpec { per_class: a.per_class, ..Default::default() };
            let (xs, ls) = planted_motifs(&spec, seed)?;
            let mut manifest = Vec::new();
            for (i, (x, l)) in xs.iter().zip(&ls).enumerate() {
                let name = format!("rec_{i:04}.csv");
                let (rows, cols) = x.shape();
                let mut text = String::new();
                for r in 0..rows {
                    let line: Vec<String> = (0..cols).map(|c| x.get(r, c).to_string()).collect();
                    text.push_str(&line.join(","));
                    text.push('\n');
                }
                fs::write(a.out.join(&name), text)?;
                manifest.push(json!({ "file": name, "label": l }));
            }
            let path = a.out.join("manifest.json");
            fs::write(&path, serde_json::to_string_pretty(&json!({ "samples": manifest }))?)?;
            written.push(path);
        }
        SynthKind::Textures => {
            let (ims, ls) = two_textures(a.per_class, a.side, 2, seed)?;
            for (i, (im, l)) in ims.iter().zip(&ls).enumerate() {
                let dir = a.out.join(l);
                fs::create_dir_all(&dir)?;
                let path = dir.join(format!("img_{i:04}.pgm"));
                fs::write(&path, pipeline::ingest::encode_pgm(im))?;
                written.push(path);
            }
        }
        SynthKind::Polygons => {
            let polys = (0..2 * a.per_class)
                .map(|i| {
                    let (v, label) = if i % 2 == 0 { (5, "five") } else { (12, "twelve") };
                    random_polygon(v, seed.wrapping_add(i as u64))
                        .map(|vertices| json!({ "label": label, "vertices": vertices }))
                })
                .collect::<maxfilt::Result<Vec<_>>>()?;
            let path = a.out.join("polygons.json");
            fs::write(&path, serde_json::to_string_pretty(&polys)?)?;
            written.push(path);
        }
    }
    Ok(json!({ "files": written.len(), "first": written.first().map(|p| p.display().to_string()) }))
}
