//! On-disk formats.
//!
//! JSON documents carry `schema_version: 1`, reject unknown fields, and are
//! written with sorted keys and a trailing newline. A dataset bundle is a
//! directory:
//!
//! | file              | header                       | required |
//! |-------------------|------------------------------|----------|
//! | `assessments.csv` | `grader_id,item_id,grade`    | yes      |
//! | `truth.csv`       | `item_id,value`              | yes      |
//! | `ownership.csv`   | `user_id,item_id,weight`     | no       |
//! | `social.csv`      | `user_a,user_b,weight`       | no       |
//! | `manifest.json`   | declared user and item ids   | no       |
//!
//! Floats are written in shortest round-trip form, so a save/load cycle
//! reproduces every value bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gcn::{ModelParams, TrainConfig};
use crate::graph::{Dataset, GraphBuilder, GroundTruth};
use crate::harness::{ExperimentReport, Method, SplitConfig, SweepParam, SweepPoint, SweepSpec};
use crate::synthetic::{AssessmentModel, MixtureConfig, ScenarioConfig, SocialModel};

pub const SCHEMA_VERSION: u32 = 1;

pub const ASSESSMENTS_FILE: &str = "assessments.csv";
pub const OWNERSHIP_FILE: &str = "ownership.csv";
pub const SOCIAL_FILE: &str = "social.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const ASSESSMENT_HEADER: [&str; 3] = ["grader_id", "item_id", "grade"];
const OWNERSHIP_HEADER: [&str; 3] = ["user_id", "item_id", "weight"];
const SOCIAL_HEADER: [&str; 3] = ["user_a", "user_b", "weight"];
const TRUTH_HEADER: [&str; 2] = ["item_id", "value"];

// ---------------------------------------------------------------- JSON

/// Sorted-key, newline-terminated JSON with `schema_version` added.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Json {
        pointer: String::new(),
        message: e.to_string(),
    })?;
    match &mut v {
        Value::Object(map) => {
            map.insert("schema_version".into(), SCHEMA_VERSION.into());
        }
        _ => {
            return Err(Error::Json {
                pointer: String::new(),
                message: "top-level document must be an object".into(),
            })
        }
    }
    let mut text = serde_json::to_string_pretty(&v).expect("value serializes");
    text.push('\n');
    Ok(text)
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses a versioned document, reporting failures with a JSON pointer.
pub fn from_versioned_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Json {
        pointer: String::new(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = &mut value else {
        return Err(Error::Json {
            pointer: String::new(),
            message: "top-level document must be an object".into(),
        });
    };
    match map.remove("schema_version") {
        Some(v) if v == SCHEMA_VERSION => {}
        Some(v) => {
            return Err(Error::Schema {
                found: v.to_string(),
                expected: SCHEMA_VERSION,
            })
        }
        None => {
            return Err(Error::Schema {
                found: "nothing".into(),
                expected: SCHEMA_VERSION,
            })
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| Error::Json {
        pointer: json_pointer(e.path()),
        message: e.inner().to_string(),
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_versioned_json(&read_text(path)?)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_text(path, &to_canonical_json(value)?)
}

// ------------------------------------------------------------- configs

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Default,
    Strategic,
}

/// A scenario as written in a config file: an optional preset plus
/// field-level overrides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub social: Option<SocialModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assessment: Option<AssessmentModel>,
}

impl ScenarioFile {
    pub fn resolve(&self) -> ScenarioConfig {
        let base = match self.preset.unwrap_or(Preset::Default) {
            Preset::Default => ScenarioConfig::default(),
            Preset::Strategic => ScenarioConfig::strategic(),
        };
        ScenarioConfig {
            n: self.n.unwrap_or(base.n),
            m: self.m.unwrap_or(base.m),
            seed: self.seed.unwrap_or(base.seed),
            mixture: self.mixture.unwrap_or(base.mixture),
            social: self.social.unwrap_or(base.social),
            assessment: self.assessment.unwrap_or(base.assessment),
        }
    }
}

impl From<ScenarioConfig> for ScenarioFile {
    fn from(c: ScenarioConfig) -> Self {
        ScenarioFile {
            preset: None,
            n: Some(c.n),
            m: Some(c.m),
            seed: Some(c.seed),
            mixture: Some(c.mixture),
            social: Some(c.social),
            assessment: Some(c.assessment),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    Ok(from_versioned_json::<ScenarioFile>(text)?.resolve())
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    parse_config(&read_text(path)?)
}

pub fn write_config(cfg: &ScenarioConfig, path: &Path) -> Result<()> {
    write_json(&ScenarioFile::from(*cfg), path)
}

pub fn load_train_config(path: &Path) -> Result<TrainConfig> {
    read_json(path)
}

pub fn load_split_config(path: &Path) -> Result<SplitConfig> {
    read_json(path)
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

/// A sweep as written in a spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub param: SweepParam,
    pub values: Vec<f64>,
    #[serde(default)]
    pub base: ScenarioFile,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub train: TrainConfig,
}

impl SweepFile {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            param: self.param,
            values: self.values.clone(),
            base: self.base.resolve(),
        }
    }
}

pub fn load_sweep(path: &Path) -> Result<SweepFile> {
    read_json(path)
}

pub fn write_results(report: &ExperimentReport, path: &Path) -> Result<()> {
    write_json(report, path)
}

pub fn read_results(path: &Path) -> Result<ExperimentReport> {
    read_json(path)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepResults {
    points: Vec<SweepPoint>,
}

pub fn sweep_results_json(points: &[SweepPoint]) -> Result<String> {
    to_canonical_json(&SweepResults {
        points: points.to_vec(),
    })
}

// ---------------------------------------------------------- checkpoint

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightMatrix {
    rows: usize,
    cols: usize,
    /// Row-major.
    data: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Checkpoint {
    config: TrainConfig,
    seed: u64,
    layers: Vec<WeightMatrix>,
    head_weight: Vec<f64>,
    head_bias: f64,
}

pub fn model_to_json(params: &ModelParams, cfg: &TrainConfig) -> Result<String> {
    let layers = params
        .weights
        .iter()
        .map(|w| WeightMatrix {
            rows: w.nrows(),
            cols: w.ncols(),
            data: w.iter().copied().collect(),
        })
        .collect();
    to_canonical_json(&Checkpoint {
        config: *cfg,
        seed: cfg.seed,
        layers,
        head_weight: params.head_weight.to_vec(),
        head_bias: params.head_bias,
    })
}

pub fn model_from_json(text: &str) -> Result<(ModelParams, TrainConfig)> {
    let ck: Checkpoint = from_versioned_json(text)?;
    let bad = |msg: String| Error::Json {
        pointer: "/layers".into(),
        message: msg,
    };
    let weights = ck
        .layers
        .into_iter()
        .map(|l| {
            Array2::from_shape_vec((l.rows, l.cols), l.data)
                .map_err(|e| bad(format!("weight shape: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let params = ModelParams {
        weights,
        head_weight: Array1::from(ck.head_weight),
        head_bias: ck.head_bias,
    };
    Ok((params, ck.config))
}

pub fn save_model(params: &ModelParams, cfg: &TrainConfig, path: &Path) -> Result<()> {
    write_text(path, &model_to_json(params, cfg)?)
}

pub fn load_model(path: &Path) -> Result<(ModelParams, TrainConfig)> {
    model_from_json(&read_text(path)?)
}

// ------------------------------------------------------------- bundles

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LoadOptions {
    /// Divide every grade and truth value by this maximum.
    pub scale_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    users: Vec<String>,
    items: Vec<String>,
}

struct CsvRows {
    file: String,
    reader: csv::Reader<fs::File>,
}

impl CsvRows {
    fn open(path: &Path, header: &[&str]) -> Result<Self> {
        let file = path.display().to_string();
        let handle = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(handle);
        let found = reader.headers().map_err(|e| Error::Csv {
            file: file.clone(),
            line: 1,
            message: e.to_string(),
        })?;
        if found.iter().ne(header.iter().copied()) {
            return Err(Error::Csv {
                file,
                line: 1,
                message: format!(
                    "expected header `{}`, found `{}`",
                    header.join(","),
                    found.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        Ok(CsvRows { file, reader })
    }

    /// Calls `f(line, fields)` per data row.
    fn for_each(
        mut self,
        width: usize,
        mut f: impl FnMut(u64, &csv::StringRecord) -> std::result::Result<(), String>,
    ) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            let more = self.reader.read_record(&mut record).map_err(|e| Error::Csv {
                file: self.file.clone(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            if !more {
                return Ok(());
            }
            let line = record.position().map_or(0, |p| p.line());
            let fail = |message| Error::Csv {
                file: self.file.clone(),
                line,
                message,
            };
            if record.len() != width {
                return Err(fail(format!("expected {width} fields, found {}", record.len())));
            }
            f(line, &record).map_err(fail)?;
        }
    }
}

fn parse_number(field: &str) -> std::result::Result<f64, String> {
    field
        .parse::<f64>()
        .map_err(|_| format!("`{field}` is not a number"))
}

fn scaled_unit(field: &str, scale: f64) -> std::result::Result<f64, String> {
    let raw = parse_number(field)?;
    let v = raw / scale;
    if crate::graph::unit_weight(v) {
        Ok(v)
    } else if scale == 1.0 {
        Err(format!("value {raw} outside [0,1] (pass a scale maximum?)"))
    } else {
        Err(format!("value {raw} outside [0,{scale}]"))
    }
}

fn unit(field: &str) -> std::result::Result<f64, String> {
    scaled_unit(field, 1.0)
}

/// Reads a bundle directory into a dataset with an empty split.
pub fn load_dataset(dir: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let scale = match opts.scale_max {
        None => 1.0,
        Some(s) if s.is_finite() && s > 0.0 => s,
        Some(s) => return Err(Error::validation(format!("scale maximum {s} must be > 0"))),
    };
    let mut builder = GraphBuilder::new();
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest: Option<Manifest> = if manifest_path.exists() {
        Some(read_json(&manifest_path)?)
    } else {
        None
    };
    if let Some(m) = &manifest {
        for u in &m.users {
            builder.user(u.clone());
        }
        for i in &m.items {
            builder.item(i.clone());
        }
    }

    CsvRows::open(&dir.join(ASSESSMENTS_FILE), &ASSESSMENT_HEADER)?.for_each(3, |_, r| {
        builder.assessment(&r[0], &r[1], scaled_unit(&r[2], scale)?);
        Ok(())
    })?;
    let ownership = dir.join(OWNERSHIP_FILE);
    if ownership.exists() {
        CsvRows::open(&ownership, &OWNERSHIP_HEADER)?.for_each(3, |_, r| {
            builder.ownership(&r[0], &r[1], unit(&r[2])?);
            Ok(())
        })?;
    }
    let social = dir.join(SOCIAL_FILE);
    if social.exists() {
        CsvRows::open(&social, &SOCIAL_HEADER)?.for_each(3, |_, r| {
            builder.social(&r[0], &r[1], unit(&r[2])?);
            Ok(())
        })?;
    }
    let graph = builder.build()?;
    if let Some(m) = &manifest {
        if graph.user_ids != m.users || graph.item_ids != m.items {
            return Err(Error::validation(format!(
                "{} does not list every id used by the CSV files",
                manifest_path.display()
            )));
        }
    }

    let mut truth = GroundTruth::new(vec![None; graph.n_items()])?;
    let mut unknown: Option<(u64, String)> = None;
    CsvRows::open(&dir.join(TRUTH_FILE), &TRUTH_HEADER)?.for_each(2, |line, r| {
        let value = scaled_unit(&r[1], scale)?;
        match graph.item_index(&r[0]) {
            Some(i) if truth.get(i).is_some() => Err(format!("duplicate truth for `{}`", &r[0])),
            Some(i) => {
                truth.set(i, Some(value));
                Ok(())
            }
            None => {
                unknown.get_or_insert((line, r[0].to_string()));
                Ok(())
            }
        }
    })?;
    if let Some((line, item)) = unknown {
        return Err(Error::UnknownItem(format!("{item} ({TRUTH_FILE}:{line})")));
    }
    Dataset::new(graph, truth)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    let io_err = |e: csv::Error| Error::io(path, e.into());
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn remove_if_present(path: PathBuf) -> Result<()> {
    match fs::remove_file(&path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(Error::io(path, e)),
        _ => Ok(()),
    }
}

/// Writes a bundle; empty ownership or social relations are omitted.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let g = &dataset.graph;
    write_json(
        &Manifest {
            users: g.user_ids.clone(),
            items: g.item_ids.clone(),
        },
        &dir.join(MANIFEST_FILE),
    )?;
    write_rows(
        &dir.join(ASSESSMENTS_FILE),
        &ASSESSMENT_HEADER,
        g.assessment
            .triplets()
            .map(|(u, i, w)| vec![g.user_ids[u].clone(), g.item_ids[i].clone(), w.to_string()]),
    )?;
    if g.ownership.nnz() > 0 {
        write_rows(
            &dir.join(OWNERSHIP_FILE),
            &OWNERSHIP_HEADER,
            g.ownership.triplets().map(|(u, i, w)| {
                vec![g.user_ids[u].clone(), g.item_ids[i].clone(), w.to_string()]
            }),
        )?;
    } else {
        remove_if_present(dir.join(OWNERSHIP_FILE))?;
    }
    if g.social.nnz() > 0 {
        write_rows(
            &dir.join(SOCIAL_FILE),
            &SOCIAL_HEADER,
            g.social.triplets().filter(|(a, b, _)| a < b).map(|(a, b, w)| {
                vec![g.user_ids[a].clone(), g.user_ids[b].clone(), w.to_string()]
            }),
        )?;
    } else {
        remove_if_present(dir.join(SOCIAL_FILE))?;
    }
    write_rows(
        &dir.join(TRUTH_FILE),
        &TRUTH_HEADER,
        dataset
            .truth
            .values()
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| vec![g.item_ids[i].clone(), v.to_string()])),
    )
}
