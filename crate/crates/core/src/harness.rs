//! Monte Carlo cross-validation, RMSE scoring, experiments and sweeps.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{average_predict, median_predict};
use crate::error::{Error, Result};
use crate::gcn::{initial_features, predict, train_on, TrainConfig};
use crate::graph::{Dataset, GroundTruth, Split};
use crate::propagation::PropagationMatrix;
use crate::rng::{streams, substream};
use crate::synthetic::{build_scenario, AssessmentModel, ScenarioConfig, SocialModel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub n_splits: usize,
    pub seed: u64,
}

impl Default for SplitConfig {
    /// 1:9 train/test, four splits.
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.1,
            n_splits: 4,
            seed: 0,
        }
    }
}

impl SplitConfig {
    /// 1:4 train/test, used for real peer-grading data.
    pub fn real_data() -> Self {
        SplitConfig {
            train_fraction: 0.2,
            ..Self::default()
        }
    }
}

pub fn monte_carlo_splits(item_count: usize, cfg: &SplitConfig) -> Result<Vec<Split>> {
    let all: Vec<usize> = (0..item_count).collect();
    monte_carlo_splits_over(&all, cfg)
}

/// Independent uniform partitions of `eligible`; train size is
/// `round(train_fraction * |eligible|)`. Both halves come back sorted.
pub fn monte_carlo_splits_over(eligible: &[usize], cfg: &SplitConfig) -> Result<Vec<Split>> {
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::validation(format!(
            "train fraction {} not in (0,1)",
            cfg.train_fraction
        )));
    }
    if cfg.n_splits == 0 {
        return Err(Error::validation("n_splits must be at least 1"));
    }
    let count = eligible.len();
    let train_size = (cfg.train_fraction * count as f64).round() as usize;
    if train_size == 0 || train_size >= count {
        return Err(Error::validation(format!(
            "fraction {} of {count} items leaves an empty train or test set",
            cfg.train_fraction
        )));
    }
    Ok((0..cfg.n_splits)
        .map(|k| {
            let mut rng = substream(cfg.seed, streams::SPLIT_BASE + k as u64);
            let mut ids = eligible.to_vec();
            ids.shuffle(&mut rng);
            let mut test = ids.split_off(train_size);
            ids.sort_unstable();
            test.sort_unstable();
            Split { train: ids, test }
        })
        .collect())
}

/// Root mean squared error; `predictions[k]` is the estimate for `ids[k]`.
pub fn rmse(predictions: &[f64], truth: &GroundTruth, ids: &[usize]) -> Result<f64> {
    if ids.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    if predictions.len() != ids.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} items",
            predictions.len(),
            ids.len()
        )));
    }
    let targets = truth.require(ids)?;
    let sse: f64 = predictions
        .iter()
        .zip(&targets)
        .map(|(p, v)| (v - p) * (v - p))
        .sum();
    Ok((sse / ids.len() as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "gcn-soan")]
    GcnSoan,
    #[serde(rename = "average")]
    Average,
    #[serde(rename = "median")]
    Median,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::GcnSoan, Method::Average, Method::Median];

    pub fn name(self) -> &'static str {
        match self {
            Method::GcnSoan => "gcn-soan",
            Method::Average => "average",
            Method::Median => "median",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitResult {
    pub index: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub rmse: BTreeMap<Method, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation across splits; 0 for a single split.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary { mean, std }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    /// Absent when the experiment ran on a loaded dataset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    pub split: SplitConfig,
    pub train: TrainConfig,
    pub methods: Vec<Method>,
    pub splits: Vec<SplitResult>,
    pub summary: BTreeMap<Method, Summary>,
    /// Elapsed time; the only field that varies between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn mean(&self, method: Method) -> Option<f64> {
        self.summary.get(&method).map(|s| s.mean)
    }

    pub fn without_timing(mut self) -> Self {
        self.wall_clock_seconds = None;
        self
    }
}

#[derive(Clone, Debug)]
pub enum ExperimentInput {
    Scenario(ScenarioConfig),
    Dataset(Box<Dataset>),
}

/// Runs `f` on a pool of `jobs` threads, or inline when `jobs <= 1`.
fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::validation(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn evaluate_split(
    dataset: &Dataset,
    prop: &PropagationMatrix,
    split: &Split,
    index: usize,
    methods: &[Method],
    train_cfg: &TrainConfig,
) -> Result<SplitResult> {
    let mut scores = BTreeMap::new();
    for &method in methods {
        let predictions = match method {
            Method::Average => average_predict(&dataset.graph, &split.test)?,
            Method::Median => median_predict(&dataset.graph, &split.test)?,
            Method::GcnSoan => {
                let out = train_on(prop, &dataset.truth, &split.train, train_cfg)?;
                let h0 = initial_features(train_cfg.features, prop.n_nodes());
                predict(&out.params, prop, &h0, &split.test)?
            }
        };
        scores.insert(method, rmse(&predictions, &dataset.truth, &split.test)?);
    }
    Ok(SplitResult {
        index,
        train_size: split.train.len(),
        test_size: split.test.len(),
        rmse: scores,
    })
}

/// Trains and scores every method on each Monte Carlo split. All methods
/// see the same test items within a split.
pub fn run_experiment(
    input: &ExperimentInput,
    methods: &[Method],
    split_cfg: &SplitConfig,
    train_cfg: &TrainConfig,
    jobs: usize,
) -> Result<ExperimentReport> {
    if methods.is_empty() {
        return Err(Error::Empty("method list"));
    }
    let start = Instant::now();
    let (scenario, dataset) = match input {
        ExperimentInput::Scenario(cfg) => (Some(*cfg), build_scenario(cfg)?),
        ExperimentInput::Dataset(d) => (None, (**d).clone()),
    };
    let splits = monte_carlo_splits_over(&dataset.truth.known_ids(), split_cfg)?;
    let prop = PropagationMatrix::new(&dataset.graph);

    let results: Vec<Result<SplitResult>> = with_jobs(jobs, || {
        splits
            .par_iter()
            .enumerate()
            .map(|(k, split)| evaluate_split(&dataset, &prop, split, k, methods, train_cfg))
            .collect()
    })?;
    let splits: Vec<SplitResult> = results
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            r.map_err(|e| {
                warn!("split {k} failed: {e}");
                e
            })
        })
        .collect::<Result<_>>()?;

    let summary = methods
        .iter()
        .map(|&m| {
            let values: Vec<f64> = splits.iter().map(|s| s.rmse[&m]).collect();
            (m, Summary::of(&values))
        })
        .collect();
    let report = ExperimentReport {
        scenario,
        split: *split_cfg,
        train: *train_cfg,
        methods: methods.to_vec(),
        splits,
        summary,
        wall_clock_seconds: Some(start.elapsed().as_secs_f64()),
    };
    info!(
        "experiment done in {:.1}s: {}",
        start.elapsed().as_secs_f64(),
        report
            .summary
            .iter()
            .map(|(m, s)| format!("{m}={:.4}", s.mean))
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    K,
    Alpha,
    Beta,
    Mu,
    Tau,
    P,
    Layers,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::K => "k",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
            SweepParam::Mu => "mu",
            SweepParam::Tau => "tau",
            SweepParam::P => "p",
            SweepParam::Layers => "layers",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    #[serde(default)]
    pub base: ScenarioConfig,
}

fn as_count(param: SweepParam, value: f64) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::validation(format!(
            "{} must be a non-negative integer, got {value}",
            param.name()
        )))
    }
}

/// Configuration for grid point `index`. Every parameter except `layers`
/// regenerates data and splits with seeds offset by `index`; `layers`
/// keeps the dataset and splits fixed and offsets the training seed.
pub fn sweep_point(
    spec: &SweepSpec,
    index: usize,
    split_cfg: &SplitConfig,
    train_cfg: &TrainConfig,
) -> Result<(ScenarioConfig, SplitConfig, TrainConfig)> {
    let value = spec.values[index];
    let offset = index as u64;
    let mut scenario = spec.base;
    let mut split = *split_cfg;
    let mut train = *train_cfg;
    match spec.param {
        SweepParam::Layers => {
            train.layers = as_count(spec.param, value)?;
            train.seed = train_cfg.seed.wrapping_add(offset);
            return Ok((scenario, split, train));
        }
        SweepParam::K => scenario.assessment.set_k(as_count(spec.param, value)?),
        SweepParam::Alpha | SweepParam::Beta => match &mut scenario.assessment {
            AssessmentModel::BiasReliability { alpha, beta, .. } => {
                if spec.param == SweepParam::Alpha {
                    *alpha = value;
                } else {
                    *beta = value;
                }
            }
            AssessmentModel::Strategic { .. } => {
                return Err(Error::validation(format!(
                    "{} sweep needs the bias-reliability grading model",
                    spec.param.name()
                )))
            }
        },
        SweepParam::Mu => scenario.mixture.mu = [value, value],
        SweepParam::Tau => scenario.social = SocialModel::Homophily { tau: value },
        SweepParam::P => scenario.social = SocialModel::Er { p: value },
    }
    scenario.seed = spec.base.seed.wrapping_add(offset);
    split.seed = split_cfg.seed.wrapping_add(offset);
    Ok((scenario, split, train))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub param: SweepParam,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ExperimentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One experiment per grid value. A failing point is recorded and the
/// sweep moves on.
pub fn run_sweep(
    spec: &SweepSpec,
    methods: &[Method],
    split_cfg: &SplitConfig,
    train_cfg: &TrainConfig,
    jobs: usize,
) -> Result<Vec<SweepPoint>> {
    if spec.values.is_empty() {
        return Err(Error::Empty("sweep grid"));
    }
    with_jobs(jobs, || {
        (0..spec.values.len())
            .into_par_iter()
            .map(|k| {
                let value = spec.values[k];
                let outcome = sweep_point(spec, k, split_cfg, train_cfg).and_then(
                    |(scenario, split, train)| {
                        run_experiment(
                            &ExperimentInput::Scenario(scenario),
                            methods,
                            &split,
                            &train,
                            1,
                        )
                    },
                );
                let (report, error) = match outcome {
                    Ok(r) => (Some(r), None),
                    Err(e) => {
                        warn!("{} = {value} failed: {e}", spec.param.name());
                        (None, Some(e.to_string()))
                    }
                };
                SweepPoint {
                    param: spec.param,
                    value,
                    report,
                    error,
                }
            })
            .collect()
    })
}

pub const CSV_HEADER: &str = "param,value,method,split,rmse";

fn push_report_rows(out: &mut String, param: &str, value: f64, report: &ExperimentReport) {
    for &m in &report.methods {
        for s in &report.splits {
            let _ = writeln!(out, "{param},{value},{m},{},{}", s.index, s.rmse[&m]);
        }
        let summary = report.summary[&m];
        let _ = writeln!(out, "{param},{value},{m},mean,{}", summary.mean);
        let _ = writeln!(out, "{param},{value},{m},std,{}", summary.std);
    }
}

/// Long-format CSV: one row per split, plus `mean` and `std` rows per
/// (value, method). A failed point produces `failed` rows with no rmse.
pub fn sweep_csv(points: &[SweepPoint], methods: &[Method]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for p in points {
        match &p.report {
            Some(r) => push_report_rows(&mut out, p.param.name(), p.value, r),
            None => {
                for m in methods {
                    let _ = writeln!(out, "{},{},{m},failed,", p.param.name(), p.value);
                }
            }
        }
    }
    out
}

/// The same long format for a single experiment, tagged `param = none`.
pub fn report_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    push_report_rows(&mut out, "none", 0.0, report);
    out
}
