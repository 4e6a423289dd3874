use std::fs;
use std::path::Path;

use serde::Serialize;

use super::svg::{LineChart, Series};
use super::{BenchConfig, BenchResult, ErrorRatioResult};
use crate::error::Result;

/// Written next to the tables so a run can be traced back to its inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub workers: usize,
    pub config: BenchConfig,
    pub files: Vec<String>,
}

fn to_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn results_csv(result: &BenchResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["estimator", "intensity", "expected_count", "mean", "bias", "rmse", "stderr", "config_hash"])?;
    for p in &result.points {
        for s in &p.stats {
            w.write_record([
                s.estimator.as_str().to_string(),
                p.intensity.to_string(),
                p.expected_count.to_string(),
                s.mean.to_string(),
                s.bias.to_string(),
                s.rmse.to_string(),
                s.stderr.to_string(),
                result.config_hash.clone(),
            ])?;
        }
    }
    to_string(w)
}

pub fn moments_csv(result: &BenchResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "intensity",
        "expected_count",
        "missing_mean",
        "missing_variance",
        "missing_stderr",
        "n_boundary_mean",
        "n_boundary_stderr",
        "n_total_mean",
        "max_dilation_rel_error",
        "config_hash",
    ])?;
    for p in &result.points {
        let m = &p.moments;
        w.write_record([
            p.intensity.to_string(),
            p.expected_count.to_string(),
            m.missing_mean.to_string(),
            m.missing_variance.to_string(),
            m.missing_stderr.to_string(),
            m.n_boundary_mean.to_string(),
            m.n_boundary_stderr.to_string(),
            m.n_total_mean.to_string(),
            opt(m.max_dilation_rel_error),
            result.config_hash.clone(),
        ])?;
    }
    to_string(w)
}

pub fn error_ratio_csv(result: &ErrorRatioResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "intensity",
        "expected_count",
        "hull_error",
        "hull_error_stderr",
        "dilated_error",
        "dilated_error_stderr",
        "ratio",
        "ratio_stderr",
        "degenerate_replicates",
        "config_hash",
    ])?;
    for r in &result.rows {
        w.write_record([
            r.intensity.to_string(),
            r.expected_count.to_string(),
            r.hull_error.to_string(),
            r.hull_error_stderr.to_string(),
            r.dilated_error.to_string(),
            r.dilated_error_stderr.to_string(),
            r.ratio.to_string(),
            r.ratio_stderr.to_string(),
            r.degenerate_replicates.to_string(),
            result.config_hash.clone(),
        ])?;
    }
    to_string(w)
}

fn write_manifest(dir: &Path, config: &BenchConfig, workers: usize, files: Vec<String>) -> Result<Manifest> {
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        master_seed: config.master_seed,
        workers,
        config: config.clone(),
        files,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Writes `results.csv`, `moments.csv`, `manifest.json` and optionally `plots/*.svg` into `dir`.
pub fn write_rmse(dir: &Path, config: &BenchConfig, result: &BenchResult, workers: usize, plots: bool) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), results_csv(result)?)?;
    fs::write(dir.join("moments.csv"), moments_csv(result)?)?;
    let mut files = vec!["results.csv".to_string(), "moments.csv".to_string()];
    if plots {
        fs::create_dir_all(dir.join("plots"))?;
        let series = result
            .estimators
            .iter()
            .map(|&id| Series {
                name: id.to_string(),
                points: result
                    .points
                    .iter()
                    .filter_map(|p| p.stats.iter().find(|s| s.estimator == id).map(|s| (p.expected_count, s.rmse)))
                    .collect(),
            })
            .collect();
        let chart = LineChart {
            title: "Normalised RMSE".into(),
            x_label: "expected points".into(),
            y_label: "RMSE / volume".into(),
            log_x: true,
            log_y: true,
            series,
        };
        fs::write(dir.join("plots/rmse.svg"), chart.render())?;
        let missing = LineChart {
            title: "Missing volume".into(),
            x_label: "expected points".into(),
            y_label: "mean missing volume".into(),
            log_x: true,
            log_y: true,
            series: vec![Series {
                name: "missing".into(),
                points: result.points.iter().map(|p| (p.expected_count, p.moments.missing_mean)).collect(),
            }],
        };
        fs::write(dir.join("plots/missing_volume.svg"), missing.render())?;
        files.push("plots/rmse.svg".into());
        files.push("plots/missing_volume.svg".into());
    }
    write_manifest(dir, config, workers, files)
}

/// Writes `error_ratio.csv`, `manifest.json` and optionally `plots/error_ratio.svg` into `dir`.
pub fn write_error_ratio(
    dir: &Path,
    config: &BenchConfig,
    result: &ErrorRatioResult,
    workers: usize,
    plots: bool,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("error_ratio.csv"), error_ratio_csv(result)?)?;
    let mut files = vec!["error_ratio.csv".to_string()];
    if plots {
        fs::create_dir_all(dir.join("plots"))?;
        let chart = LineChart {
            title: "Hull error over dilated-hull error".into(),
            x_label: "expected points".into(),
            y_label: "ratio".into(),
            log_x: true,
            log_y: false,
            series: vec![Series {
                name: "ratio".into(),
                points: result.rows.iter().map(|r| (r.expected_count, r.ratio)).collect(),
            }],
        };
        fs::write(dir.join("plots/error_ratio.svg"), chart.render())?;
        files.push("plots/error_ratio.svg".into());
    }
    write_manifest(dir, config, workers, files)
}
