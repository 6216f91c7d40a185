use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::RowWriter;
use super::run::{run_experiment, RunSummary};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const AGGREGATE_HEADER: &str = "config,metric,mean,std,runs";
pub const FAILURES_FILE: &str = "failures.csv";
pub const FAILURES_HEADER: &str = "config,seed,error";

/// Mean and population standard deviation of one metric over the runs
/// of one configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub config: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub config: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct MatrixReport {
    pub runs: Vec<(String, u64, RunSummary)>,
    pub aggregates: Vec<AggregateRow>,
    pub failures: Vec<RunFailure>,
}

/// Scalar metrics extracted from one run. Keys are stable names used in
/// the aggregate file.
pub fn run_metrics(summary: &RunSummary) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    out.insert("boundaries_detected".to_string(), summary.boundaries.len() as f64);
    for &(label, mean, _) in &summary.final_returns {
        out.insert(format!("final_return_task{label}"), mean);
    }
    for (label, share) in &summary.final_composition {
        out.insert(format!("final_ratio_task{label}"), share.ratio);
    }
    for (label, share) in &summary.final_long_term_composition {
        out.insert(format!("final_long_term_ratio_task{label}"), share.ratio);
    }
    out
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs every `(config, seed)` pair. Run `i` of config `name` writes to
/// `out_root/name/seed-<seed>/`. A failing run is recorded and skipped.
pub fn run_matrix(configs: &[(String, ExperimentConfig)], seeds: &[u64], out_root: &Path) -> Result<MatrixReport> {
    if configs.is_empty() || seeds.is_empty() {
        return Err(Error::ConfigInvalid("matrix needs at least one config and one seed".into()));
    }
    std::fs::create_dir_all(out_root).map_err(|e| Error::io(out_root, e))?;

    let mut report = MatrixReport::default();
    for (name, config) in configs {
        let mut per_metric: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for &seed in seeds {
            let mut config = config.clone();
            config.harness.seed = seed;
            let dir = out_root.join(name).join(format!("seed-{seed}"));
            match run_experiment(&config, &dir) {
                Ok(summary) => {
                    for (metric, value) in run_metrics(&summary) {
                        per_metric.entry(metric).or_default().push(value);
                    }
                    report.runs.push((name.clone(), seed, summary));
                }
                Err(e) => report.failures.push(RunFailure {
                    config: name.clone(),
                    seed,
                    error: e.to_string(),
                }),
            }
        }
        for (metric, values) in per_metric {
            let (mean, std) = mean_std(&values);
            report.aggregates.push(AggregateRow {
                config: name.clone(),
                metric,
                mean,
                std,
                runs: values.len(),
            });
        }
    }

    let mut aggregate = RowWriter::create(&out_root.join(AGGREGATE_FILE), AGGREGATE_HEADER)?;
    for row in &report.aggregates {
        aggregate.write(row)?;
    }
    aggregate.finish()?;
    let mut failures = RowWriter::create(&out_root.join(FAILURES_FILE), FAILURES_HEADER)?;
    for row in &report.failures {
        failures.write(row)?;
    }
    failures.finish()?;
    Ok(report)
}
