use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use convex_volume::bench::{self, BenchConfig, Experiment};
use convex_volume::estimators::{dilated_hull_with, dilation_factor, evaluate, final_estimate};
use convex_volume::io::{self, SampleSidecar};
use convex_volume::{convex_hull, Centre, ConvexBody, EstimatorId, Error, PppConfig};

/// Seed used by `sample` when none is given.
const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Parser)]
#[command(name = "cvol", version, about = "Estimate the volume of a convex body from Poisson samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a Poisson point process on a body and write it as CSV plus a JSON sidecar.
    Sample {
        /// Body description (JSON).
        #[arg(long)]
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        intensity: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate every applicable estimator on a point cloud.
    Estimate {
        #[arg(long)]
        cloud: PathBuf,
        /// Known intensity; enables naive_count, oracle and pseudo.
        #[arg(long, allow_hyphen_values = true)]
        intensity: Option<f64>,
        /// True body (JSON); adds an error column.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Dimension to assume when the cloud file is empty.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Run a Monte Carlo study described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Write the vertices of the dilated hull of a cloud.
    Dilate {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CentreArg::VertexMean)]
        centre: CentreArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CentreArg {
    VertexMean,
    Centroid,
}

impl From<CentreArg> for Centre {
    fn from(c: CentreArg) -> Centre {
        match c {
            CentreArg::VertexMean => Centre::VertexMean,
            CentreArg::Centroid => Centre::Centroid,
        }
    }
}

enum Failure {
    /// Bad flags or input descriptions: exit 1.
    Usage(String),
    /// Everything else: exit 2.
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    info!("cvol {}", env!("CARGO_PKG_VERSION"));
    let outcome = match cli.command {
        Command::Sample { body, intensity, seed, out } => sample(&body, intensity, seed, &out),
        Command::Estimate { cloud, intensity, truth, json, dim } => estimate(&cloud, intensity, truth.as_deref(), json, dim),
        Command::Bench { config, out, workers, no_plots } => run_bench(&config, &out, workers, !no_plots),
        Command::Dilate { cloud, out, centre, json } => dilate(&cloud, &out, centre.into(), json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_body(path: &Path) -> Result<ConvexBody, Failure> {
    let body = io::read_body(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    info!("body: {}", body.to_json()?);
    Ok(body)
}

fn sample(body: &Path, intensity: f64, seed: u64, out: &Path) -> Result<(), Failure> {
    let body = load_body(body)?;
    let config = PppConfig { body, intensity, seed };
    config.validate().map_err(usage)?;
    info!("intensity {intensity}, seed {seed}");
    let cloud = convex_volume::sample_ppp(&config)?;
    io::write_cloud(out, &cloud)?;
    let sidecar_path = SampleSidecar::path_for(out);
    SampleSidecar::new(config.body, intensity, seed, cloud.len()).write(&sidecar_path)?;
    info!("wrote {} and {}", out.display(), sidecar_path.display());
    println!("{}", cloud.len());
    Ok(())
}

#[derive(Serialize)]
struct EstimateRow {
    estimator: EstimatorId,
    value: f64,
    used_intensity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    degenerate: bool,
}

#[derive(Serialize)]
struct EstimateReport {
    dim: usize,
    n_total: usize,
    n_boundary: usize,
    n_interior: usize,
    hull_volume: f64,
    intensity: Option<f64>,
    truth_volume: Option<f64>,
    estimates: Vec<EstimateRow>,
}

fn estimate(cloud_path: &Path, intensity: Option<f64>, truth: Option<&Path>, json: bool, dim: usize) -> Result<(), Failure> {
    if let Some(l) = intensity {
        if !(l > 0.0 && l.is_finite()) {
            return Err(usage(format!("intensity must be positive and finite, got {l}")));
        }
    }
    let truth = truth.map(load_body).transpose()?;
    let cloud = io::read_cloud(cloud_path, None).or_else(|e| match e {
        Error::InvalidParameter(_) => io::read_cloud(cloud_path, Some(dim)),
        e => Err(e),
    })?;
    if cloud.is_empty() {
        warn!("{} holds no points; every estimate is 0", cloud_path.display());
    }
    if let Some(body) = &truth {
        if body.dim() != cloud.dim() {
            return Err(Error::DimensionMismatch { expected: body.dim(), found: cloud.dim() }.into());
        }
    }
    let truth_volume = truth.as_ref().map(ConvexBody::volume);
    let hull = convex_hull(&cloud)?;
    let mut estimates = Vec::new();
    for id in EstimatorId::ALL {
        if let Some(e) = evaluate(id, &hull, &cloud, intensity)? {
            estimates.push(EstimateRow {
                estimator: id,
                value: e.value,
                used_intensity: e.used_intensity,
                error: truth_volume.map(|t| e.value - t),
                degenerate: e.degenerate,
            });
        }
    }
    let report = EstimateReport {
        dim: cloud.dim(),
        n_total: hull.n_total,
        n_boundary: hull.n_boundary,
        n_interior: hull.n_interior,
        hull_volume: hull.hull_volume,
        intensity,
        truth_volume,
        estimates,
    };
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(Error::from)?).map_err(Error::from)?;
        return Ok(());
    }
    let text = render_estimates(&report);
    out.write_all(text.as_bytes()).map_err(Error::from)?;
    Ok(())
}

fn render_estimates(r: &EstimateReport) -> String {
    let mut s = format!(
        "d={} N={} boundary={} interior={} hull_volume={}\n",
        r.dim, r.n_total, r.n_boundary, r.n_interior, r.hull_volume
    );
    if let Some(t) = r.truth_volume {
        s += &format!("true volume={t}\n");
        s += &format!("{:<12} {:>24} {:>24}\n", "estimator", "value", "error");
    } else {
        s += &format!("{:<12} {:>24}\n", "estimator", "value");
    }
    for e in &r.estimates {
        let flag = if e.degenerate { "  (degenerate)" } else { "" };
        match e.error {
            Some(err) => s += &format!("{:<12} {:>24} {:>24}{flag}\n", e.estimator.as_str(), e.value, err),
            None => s += &format!("{:<12} {:>24}{flag}\n", e.estimator.as_str(), e.value),
        }
    }
    s
}

fn run_bench(config_path: &Path, out: &Path, workers: Option<usize>, plots: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(config_path).map_err(|e| usage(format!("{}: {e}", config_path.display())))?;
    let config = BenchConfig::from_json(&text).map_err(|e| usage(format!("{}: {e}", config_path.display())))?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    info!(
        "body: {}; master seed {}; {} replicates; config hash {}; {workers} workers",
        config.body.to_json()?,
        config.master_seed,
        config.replicates,
        config.hash()
    );
    match config.experiment {
        Experiment::Rmse => {
            let result = bench::with_workers(workers, || bench::run_rmse(&config))??;
            bench::write_rmse(out, &config, &result, workers, plots)?;
            println!("{:<12} {:>14} {:>14} {:>14}", "estimator", "expected_n", "rmse/|C|", "bias");
            for p in &result.points {
                for s in &p.stats {
                    println!("{:<12} {:>14.2} {:>14.6e} {:>14.6e}", s.estimator.as_str(), p.expected_count, s.rmse, s.bias);
                }
            }
            if result.points.len() >= 3 {
                for &id in &result.estimators {
                    if let Ok(slope) = bench::fit_rate_slope(&result, id) {
                        println!("slope {:<12} {slope:.4}", id.as_str());
                    }
                }
            }
        }
        Experiment::ErrorRatio => {
            let result = bench::with_workers(workers, || bench::run_error_ratio(&config))??;
            bench::write_error_ratio(out, &config, &result, workers, plots)?;
            println!("{:>14} {:>12} {:>12}", "expected_n", "ratio", "stderr");
            for r in &result.rows {
                println!("{:>14.2} {:>12.6} {:>12.6}", r.expected_count, r.ratio, r.ratio_stderr);
            }
        }
    }
    info!("wrote results to {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct DilateReport {
    factor: f64,
    centre: Vec<f64>,
    vertices: usize,
    volume: f64,
    final_estimate: f64,
}

fn dilate(cloud_path: &Path, out: &Path, centre: Centre, json: bool) -> Result<(), Failure> {
    let cloud = io::read_cloud(cloud_path, None)?;
    let hull = convex_hull(&cloud)?;
    let dilated = dilated_hull_with(&hull, centre)?;
    io::write_rows_to(
        std::io::BufWriter::new(std::fs::File::create(out).map_err(Error::from)?),
        dilated.vertices().iter().map(Vec::as_slice),
    )?;
    let poly = convex_volume::Polytope::from_hull(&hull)?;
    let report = DilateReport {
        factor: dilation_factor(&hull),
        centre: poly.centre(centre),
        vertices: dilated.vertices().len(),
        volume: dilated.volume(),
        final_estimate: final_estimate(&hull).value,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    } else {
        println!(
            "vertices={} factor={} volume={} final_estimate={}",
            report.vertices, report.factor, report.volume, report.final_estimate
        );
    }
    Ok(())
}
