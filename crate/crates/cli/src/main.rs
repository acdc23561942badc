//! `peergrade` command-line front end.
//!
//! Numeric results go to stdout as JSON or CSV, logs to stderr. Exit codes:
//! 0 success, 2 usage error, 3 invalid input, 4 runtime failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::info;
use peergrade::gcn::{initial_features, predict, train_on};
use peergrade::harness::{
    monte_carlo_splits_over, rmse, run_experiment, run_sweep, sweep_csv, ExperimentInput, Method,
    SplitConfig,
};
use peergrade::io::{
    load_config, load_dataset, load_model, load_split_config, load_sweep, load_train_config,
    save_dataset, save_model, sweep_results_json, to_canonical_json, LoadOptions,
};
use peergrade::synthetic::build_scenario;
use peergrade::{Dataset, PropagationMatrix, Split};
use serde_json::json;

#[derive(Parser)]
#[command(name = "peergrade", version, about = "Peer-grading truth prediction with GCN-SOAN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset bundle from a scenario config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a model and write a checkpoint.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        train_config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the train config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Train on one split's train items only. Without it, every item
        /// with known truth is used.
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long, default_value_t = 0, requires = "split")]
        split_index: usize,
    },
    /// Score a checkpoint on one split's test items.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long, default_value_t = 0)]
        split_index: usize,
    },
    /// Score a baseline on every split.
    Baseline {
        #[arg(long, value_parser = parse_baseline)]
        method: Method,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        split: PathBuf,
    },
    /// Run a parameter sweep and write per-split RMSE as CSV.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the full reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, env = "PEERGRADE_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Convert a directory of CSVs into a validated bundle.
    Import {
        #[arg(long)]
        from: PathBuf,
        /// Grade scale, written `max=<v>`; values are divided by v.
        #[arg(long, value_parser = parse_scale)]
        scale: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_baseline(s: &str) -> Result<Method, String> {
    match Method::from_str(s) {
        Ok(m @ (Method::Average | Method::Median)) => Ok(m),
        _ => Err(format!("expected `average` or `median`, got `{s}`")),
    }
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let v = s
        .strip_prefix("max=")
        .ok_or_else(|| format!("expected `max=<v>`, got `{s}`"))?;
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("scale maximum must be a positive number, got `{v}`")),
    }
}

fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn dataset_summary(d: &Dataset) -> serde_json::Value {
    json!({
        "users": d.graph.n_users(),
        "items": d.graph.n_items(),
        "assessments": d.graph.assessment.nnz(),
        "ownership_edges": d.graph.ownership.nnz(),
        "social_edges": d.graph.social_edge_count(),
        "items_with_truth": d.truth.known_ids().len(),
    })
}

fn choose_split(d: &Dataset, cfg: &SplitConfig, index: usize) -> anyhow::Result<Split> {
    let mut splits = monte_carlo_splits_over(&d.truth.known_ids(), cfg)?;
    if index >= splits.len() {
        bail!(peergrade::Error::Validation(format!(
            "split index {index} out of range; the split config defines {} splits",
            splits.len()
        )));
    }
    Ok(splits.swap_remove(index))
}

/// Refuses to write into the directory being read.
fn distinct_dirs(input: &Path, output: &Path) -> anyhow::Result<()> {
    if let (Ok(a), Ok(b)) = (input.canonicalize(), output.canonicalize()) {
        if a == b {
            bail!(peergrade::Error::Validation(format!(
                "output directory {} is the input directory",
                output.display()
            )));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { config, out, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let d = build_scenario(&cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            save_dataset(&d, &out)?;
            info!("wrote bundle to {}", out.display());
            emit(&to_canonical_json(&json!({
                "scenario": cfg,
                "seed": cfg.seed,
                "dataset": dataset_summary(&d),
            }))?)
        }
        Command::Train {
            data,
            train_config,
            out,
            seed,
            split,
            split_index,
        } => {
            let d = load_dataset(&data, &LoadOptions::default())?;
            let mut cfg = load_train_config(&train_config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (train_ids, split_cfg) = match split {
                Some(path) => {
                    let split_cfg = load_split_config(&path)?;
                    (choose_split(&d, &split_cfg, split_index)?.train, Some(split_cfg))
                }
                None => (d.truth.known_ids(), None),
            };
            let prop = PropagationMatrix::new(&d.graph);
            let outcome = train_on(&prop, &d.truth, &train_ids, &cfg)?;
            save_model(&outcome.params, &cfg, &out)?;
            info!("wrote checkpoint to {}", out.display());
            emit(&to_canonical_json(&json!({
                "seed": cfg.seed,
                "train": cfg,
                "split": split_cfg,
                "split_index": split_cfg.map(|_| split_index),
                "train_size": train_ids.len(),
                "initial_loss": outcome.history.first(),
                "final_loss": outcome.history.last(),
            }))?)
        }
        Command::Eval {
            data,
            model,
            split,
            split_index,
        } => {
            let d = load_dataset(&data, &LoadOptions::default())?;
            let (params, cfg) = load_model(&model)?;
            let split_cfg = load_split_config(&split)?;
            let chosen = choose_split(&d, &split_cfg, split_index)?;
            let prop = PropagationMatrix::new(&d.graph);
            let h0 = initial_features(cfg.features, prop.n_nodes());
            let pred = predict(&params, &prop, &h0, &chosen.test)?;
            let score = rmse(&pred, &d.truth, &chosen.test)?;
            let predictions: serde_json::Map<String, serde_json::Value> = chosen
                .test
                .iter()
                .zip(&pred)
                .map(|(&i, &p)| (d.graph.item_ids[i].clone(), p.into()))
                .collect();
            emit(&to_canonical_json(&json!({
                "method": Method::GcnSoan,
                "seed": cfg.seed,
                "split": split_cfg,
                "split_index": split_index,
                "test_size": chosen.test.len(),
                "rmse": score,
                "predictions": predictions,
            }))?)
        }
        Command::Baseline {
            method,
            data,
            split,
        } => {
            let d = load_dataset(&data, &LoadOptions::default())?;
            let split_cfg = load_split_config(&split)?;
            let report = run_experiment(
                &ExperimentInput::Dataset(Box::new(d)),
                &[method],
                &split_cfg,
                &Default::default(),
                1,
            )?;
            emit(&to_canonical_json(&report.without_timing())?)
        }
        Command::Sweep {
            spec,
            out,
            json,
            jobs,
        } => {
            let file = load_sweep(&spec)?;
            let points = run_sweep(&file.spec(), &file.methods, &file.split, &file.train, jobs)?;
            let points: Vec<_> = points
                .into_iter()
                .map(|mut p| {
                    p.report = p.report.map(|r| r.without_timing());
                    p
                })
                .collect();
            let failed = points.iter().filter(|p| p.report.is_none()).count();
            if failed > 0 {
                log::warn!("{failed} of {} sweep points failed", points.len());
            }
            let csv = sweep_csv(&points, &file.methods);
            fs::write(&out, &csv).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = json {
                fs::write(&path, sweep_results_json(&points)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&csv)
        }
        Command::Import { from, scale, out } => {
            let d = load_dataset(&from, &LoadOptions { scale_max: scale })?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            distinct_dirs(&from, &out)?;
            let report = d.graph.validate();
            for w in &report.warnings {
                log::warn!("{w}");
            }
            save_dataset(&d, &out)?;
            emit(&to_canonical_json(&json!({
                "scale_max": scale,
                "dataset": dataset_summary(&d),
                "warnings": report.warnings.len(),
            }))?)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<peergrade::Error>() {
        Some(e) if e.is_input_error() => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
