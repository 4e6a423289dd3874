//! Monte Carlo harness: RMSE curves over an intensity grid, rate-slope fits,
//! missing-volume moments and the dilated-hull error ratio.
//!
//! Every replicate draws from its own stream keyed by `(experiment, grid
//! index, replicate index)` and results are reduced in replicate order, so
//! output is identical for any number of workers.

mod output;
mod svg;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{dilated_hull_with, dilation_factor, evaluate, final_estimate, EstimatorId};
use crate::geometry::{dilate, proportion_estimate, Centre, ConvexBody, Polytope};
use crate::hull::convex_hull;
use crate::ppp::sample_ppp_with;
use crate::rng::RngStream;

pub use output::{error_ratio_csv, moments_csv, results_csv, write_error_ratio, write_rmse, Manifest};
pub use svg::{LineChart, Series};

const STREAM_RMSE: u64 = 1;
const STREAM_ERROR_RATIO: u64 = 2;
const STREAM_SYMDIFF: u64 = 3;

/// Intensity grid, given directly or as expected point counts `n = λ|C|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    Intensities(Vec<f64>),
    ExpectedCounts(Vec<f64>),
}

impl Grid {
    fn raw(&self) -> &[f64] {
        match self {
            Grid::Intensities(v) | Grid::ExpectedCounts(v) => v,
        }
    }

    pub fn len(&self) -> usize {
        self.raw().len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw().is_empty()
    }

    pub fn intensities(&self, body_volume: f64) -> Vec<f64> {
        match self {
            Grid::Intensities(v) => v.clone(),
            Grid::ExpectedCounts(v) => v.iter().map(|n| n / body_volume).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[default]
    Rmse,
    ErrorRatio,
}

fn all_estimators() -> Vec<EstimatorId> {
    EstimatorId::ALL.to_vec()
}

fn default_symdiff_samples() -> usize {
    100_000
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub body: ConvexBody,
    pub grid: Grid,
    #[serde(default = "all_estimators")]
    pub estimators: Vec<EstimatorId>,
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_symdiff_samples")]
    pub symdiff_samples: usize,
    #[serde(default)]
    pub experiment: Experiment,
    /// Recompute the dilated hull on every replicate and record how far its
    /// volume is from the final estimate.
    #[serde(default, skip_serializing_if = "is_false")]
    pub verify_dilation: bool,
    #[serde(default)]
    pub centre: Centre,
    /// Replaces the dilation factor in the error-ratio experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation_override: Option<f64>,
}

impl BenchConfig {
    pub fn new(body: ConvexBody, grid: Grid, replicates: usize, master_seed: u64) -> Self {
        BenchConfig {
            body,
            grid,
            estimators: all_estimators(),
            replicates,
            master_seed,
            symdiff_samples: default_symdiff_samples(),
            experiment: Experiment::Rmse,
            verify_dilation: false,
            centre: Centre::VertexMean,
            dilation_override: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: BenchConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 replicates, got {}", self.replicates)));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("intensity grid is empty".into()));
        }
        if let Some(x) = self.grid.raw().iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(format!("grid values must be positive, got {x}")));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("no estimators requested".into()));
        }
        if self.symdiff_samples == 0 {
            return Err(Error::InvalidParameter("symdiff_samples must be positive".into()));
        }
        if let Some(f) = self.dilation_override {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::InvalidParameter(format!("dilation_override must be positive, got {f}")));
            }
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.grid.intensities(self.body.volume())
    }
}

/// What one replicate produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRecord {
    pub n_total: usize,
    pub n_boundary: usize,
    pub n_interior: usize,
    pub hull_volume: f64,
    /// Estimator values, aligned with `BenchResult::estimators`.
    pub values: Vec<f64>,
    /// `|vol(C̃) − θ̂| / θ̂`, when dilation checks are on and the hull is full-dimensional.
    pub dilation_rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStats {
    pub estimator: EstimatorId,
    pub mean: f64,
    pub bias: f64,
    /// Root mean squared error divided by `|C|`.
    pub rmse: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub variance: f64,
}

/// Missing-volume diagnostics at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentStats {
    pub missing_mean: f64,
    pub missing_variance: f64,
    pub missing_stderr: f64,
    pub n_boundary_mean: f64,
    pub n_boundary_stderr: f64,
    pub n_total_mean: f64,
    pub max_dilation_rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPointResult {
    pub intensity: f64,
    pub expected_count: f64,
    pub stats: Vec<EstimatorStats>,
    pub moments: MomentStats,
    pub replicates: Vec<ReplicateRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub config_hash: String,
    pub master_seed: u64,
    pub body_volume: f64,
    pub estimators: Vec<EstimatorId>,
    pub points: Vec<GridPointResult>,
}

impl BenchResult {
    pub fn stats(&self, grid_index: usize, estimator: EstimatorId) -> Option<&EstimatorStats> {
        self.points.get(grid_index)?.stats.iter().find(|s| s.estimator == estimator)
    }

    /// `(intensity, normalised RMSE)` pairs for one estimator across the grid.
    pub fn rmse_series(&self, estimator: EstimatorId) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.stats.iter().find(|s| s.estimator == estimator).map(|s| (p.intensity, s.rmse)))
            .collect()
    }
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn mean_var(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / m;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var)
}

fn run_replicate(config: &BenchConfig, grid_index: usize, replicate: usize, intensity: f64) -> Result<ReplicateRecord> {
    let mut rng = RngStream::keyed(config.master_seed, &[STREAM_RMSE, grid_index as u64, replicate as u64]);
    let cloud = sample_ppp_with(&config.body, intensity, &mut rng)?;
    let hull = convex_hull(&cloud)?;
    let mut values = Vec::with_capacity(config.estimators.len());
    for &id in &config.estimators {
        let est = evaluate(id, &hull, &cloud, Some(intensity))?.expect("intensity is known in the harness");
        values.push(est.value);
    }
    let dilation_rel_error = if config.verify_dilation && !hull.is_degenerate() {
        let target = final_estimate(&hull).value;
        let dilated = dilated_hull_with(&hull, config.centre)?;
        Some((dilated.volume() - target).abs() / target)
    } else {
        None
    };
    Ok(ReplicateRecord {
        n_total: hull.n_total,
        n_boundary: hull.n_boundary,
        n_interior: hull.n_interior,
        hull_volume: hull.hull_volume,
        values,
        dilation_rel_error,
    })
}

fn replicate_error(grid_index: usize, replicate: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Replicate { grid_index, replicate, source: Box::new(e) }
}

/// RMSE study over the configured grid, on the current rayon pool.
pub fn run_rmse(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let truth = config.body.volume();
    let m = config.replicates;
    let mut points = Vec::with_capacity(config.grid.len());
    for (g, intensity) in config.intensities().into_iter().enumerate() {
        let replicates: Vec<ReplicateRecord> = (0..m)
            .into_par_iter()
            .map(|r| run_replicate(config, g, r, intensity).map_err(replicate_error(g, r)))
            .collect::<Result<_>>()?;

        let stats = config
            .estimators
            .iter()
            .enumerate()
            .map(|(k, &estimator)| {
                let (mean, variance) = mean_var(replicates.iter().map(|r| r.values[k]));
                let mse = replicates.iter().map(|r| (r.values[k] - truth).powi(2)).sum::<f64>() / m as f64;
                EstimatorStats {
                    estimator,
                    mean,
                    bias: mean - truth,
                    rmse: mse.sqrt() / truth,
                    stderr: (variance / m as f64).sqrt(),
                    variance,
                }
            })
            .collect();

        let (missing_mean, missing_variance) = mean_var(replicates.iter().map(|r| truth - r.hull_volume));
        let (n_boundary_mean, nb_var) = mean_var(replicates.iter().map(|r| r.n_boundary as f64));
        let n_total_mean = replicates.iter().map(|r| r.n_total as f64).sum::<f64>() / m as f64;
        let max_dilation_rel_error =
            replicates.iter().filter_map(|r| r.dilation_rel_error).reduce(f64::max);
        let moments = MomentStats {
            missing_mean,
            missing_variance,
            missing_stderr: (missing_variance / m as f64).sqrt(),
            n_boundary_mean,
            n_boundary_stderr: (nb_var / m as f64).sqrt(),
            n_total_mean,
            max_dilation_rel_error,
        };
        points.push(GridPointResult { intensity, expected_count: intensity * truth, stats, moments, replicates });
    }
    Ok(BenchResult {
        config_hash: config.hash(),
        master_seed: config.master_seed,
        body_volume: truth,
        estimators: config.estimators.clone(),
        points,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter("slope fit needs positive coordinates".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("slope fit needs distinct grid values".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Fitted exponent of RMSE against intensity for one estimator.
pub fn fit_rate_slope(result: &BenchResult, estimator: EstimatorId) -> Result<f64> {
    let series = result.rmse_series(estimator);
    if series.is_empty() {
        return Err(Error::InvalidParameter(format!("estimator {estimator} was not run")));
    }
    log_log_slope(&series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRatioRow {
    pub intensity: f64,
    pub expected_count: f64,
    /// Mean of `|C Δ Ĉ|`.
    pub hull_error: f64,
    pub hull_error_stderr: f64,
    /// Mean of `|C Δ C̃|`.
    pub dilated_error: f64,
    pub dilated_error_stderr: f64,
    pub ratio: f64,
    /// Delta-method standard error of the ratio, including the pairing covariance.
    pub ratio_stderr: f64,
    pub degenerate_replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRatioResult {
    pub config_hash: String,
    pub master_seed: u64,
    pub rows: Vec<ErrorRatioRow>,
}

/// `(|C Δ Ĉ|, |C Δ C̃|)` for one replicate, both measured on the same sample points.
fn error_pair(config: &BenchConfig, grid_index: usize, replicate: usize, intensity: f64) -> Result<Option<(f64, f64)>> {
    let keys = [grid_index as u64, replicate as u64];
    let mut rng = RngStream::keyed(config.master_seed, &[STREAM_ERROR_RATIO, keys[0], keys[1]]);
    let cloud = sample_ppp_with(&config.body, intensity, &mut rng)?;
    let hull = convex_hull(&cloud)?;
    if hull.is_degenerate() {
        return Ok(None);
    }
    let poly = Polytope::from_hull(&hull)?;
    let centre = poly.centre(config.centre);
    let factor = config.dilation_override.unwrap_or_else(|| dilation_factor(&hull));
    let dilated = dilate(&poly, &centre, factor)?;

    let frame = config.body.bounding_box().union(&poly.bounding_box()).union(&dilated.bounding_box());
    let mut rng = RngStream::keyed(config.master_seed, &[STREAM_SYMDIFF, keys[0], keys[1]]);
    let mut x = vec![0.0; config.body.dim()];
    let (mut hull_hits, mut dilated_hits) = (0, 0);
    for _ in 0..config.symdiff_samples {
        frame.sample_into(&mut rng, &mut x);
        let in_body = config.body.contains_unchecked(&x);
        hull_hits += usize::from(in_body != poly.contains(&x));
        dilated_hits += usize::from(in_body != dilated.contains(&x));
    }
    let (e_hull, _) = proportion_estimate(frame.volume(), hull_hits, config.symdiff_samples);
    let (e_dilated, _) = proportion_estimate(frame.volume(), dilated_hits, config.symdiff_samples);
    Ok(Some((e_hull, e_dilated)))
}

/// Monte Carlo ratio `E|C Δ Ĉ| / E|C Δ C̃|` at each grid point.
///
/// A replicate whose hull has no volume contributes `|C|` to both errors.
pub fn run_error_ratio(config: &BenchConfig) -> Result<ErrorRatioResult> {
    config.validate()?;
    let truth = config.body.volume();
    let m = config.replicates;
    let mut rows = Vec::with_capacity(config.grid.len());
    for (g, intensity) in config.intensities().into_iter().enumerate() {
        let pairs: Vec<Option<(f64, f64)>> = (0..m)
            .into_par_iter()
            .map(|r| error_pair(config, g, r, intensity).map_err(replicate_error(g, r)))
            .collect::<Result<_>>()?;
        let degenerate_replicates = pairs.iter().filter(|p| p.is_none()).count();
        let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|p| p.unwrap_or((truth, truth))).collect();
        let (a, var_a) = mean_var(pairs.iter().map(|p| p.0));
        let (b, var_b) = mean_var(pairs.iter().map(|p| p.1));
        let cov = pairs.iter().map(|p| (p.0 - a) * (p.1 - b)).sum::<f64>() / (m as f64 - 1.0);
        let ratio = a / b;
        let rel_var = (var_a / (a * a) + var_b / (b * b) - 2.0 * cov / (a * b)) / m as f64;
        rows.push(ErrorRatioRow {
            intensity,
            expected_count: intensity * truth,
            hull_error: a,
            hull_error_stderr: (var_a / m as f64).sqrt(),
            dilated_error: b,
            dilated_error_stderr: (var_b / m as f64).sqrt(),
            ratio,
            ratio_stderr: ratio.abs() * rel_var.max(0.0).sqrt(),
            degenerate_replicates,
        });
    }
    Ok(ErrorRatioResult { config_hash: config.hash(), master_seed: config.master_seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_config(m: usize) -> BenchConfig {
        BenchConfig::new(ConvexBody::unit_cube(2).unwrap(), Grid::ExpectedCounts(vec![50.0, 200.0]), m, 7)
    }

    #[test]
    fn config_validation() {
        let mut c = square_config(1);
        assert!(c.validate().is_err());
        c.replicates = 2;
        assert!(c.validate().is_ok());
        c.grid = Grid::Intensities(vec![]);
        assert!(c.validate().is_err());
        c.grid = Grid::Intensities(vec![10.0, -1.0]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults_and_hash() {
        let text = r#"{"body":{"kind":"box","lower":[0,0],"upper":[2,1]},
                       "grid":{"expected_counts":[100, 400]}, "replicates": 10}"#;
        let c = BenchConfig::from_json(text).unwrap();
        assert_eq!(c.estimators.len(), 7);
        assert_eq!(c.intensities(), vec![50.0, 200.0]);
        assert_eq!(c.hash().len(), 16);
        let mut other = c.clone();
        other.master_seed = 1;
        assert_ne!(c.hash(), other.hash());
        assert!(BenchConfig::from_json(r#"{"body":{"kind":"box","lower":[0],"upper":[1]},"grid":{"intensities":[1]},"replicates":5,"bogus":1}"#).is_err());
    }

    #[test]
    fn shape_of_minimal_run() {
        let mut c = square_config(2);
        c.estimators = vec![EstimatorId::NaiveHull];
        let r = run_rmse(&c).unwrap();
        assert_eq!(r.points.len(), 2);
        let evaluations: usize = r.points.iter().map(|p| p.replicates.iter().map(|x| x.values.len()).sum::<usize>()).sum();
        assert_eq!(evaluations, 2 * 2);
        for p in &r.points {
            assert!(p.stats[0].rmse >= 0.0);
        }
    }

    #[test]
    fn rmse_dominates_bias() {
        let r = run_rmse(&square_config(50)).unwrap();
        for p in &r.points {
            for s in &p.stats {
                let rmse = s.rmse * r.body_volume;
                assert!(rmse * rmse >= s.bias * s.bias - 1e-12, "{s:?}");
            }
        }
    }

    #[test]
    fn slope_fits() {
        let exact: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 5000.0].iter().map(|&l: &f64| (l, l.powf(-5.0 / 6.0))).collect();
        assert!((log_log_slope(&exact).unwrap() + 5.0 / 6.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&l| (l, 0.3)).collect();
        assert!(log_log_slope(&flat).unwrap().abs() < 1e-12);
        assert!(log_log_slope(&exact[..2]).is_err());
        assert!(log_log_slope(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = square_config(20);
        let one = with_workers(1, || run_rmse(&c)).unwrap().unwrap();
        let three = with_workers(3, || run_rmse(&c)).unwrap().unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn unit_dilation_gives_unit_ratio() {
        let mut c = square_config(20);
        c.experiment = Experiment::ErrorRatio;
        c.symdiff_samples = 2000;
        c.dilation_override = Some(1.0);
        let r = run_error_ratio(&c).unwrap();
        for row in &r.rows {
            assert!((row.ratio - 1.0).abs() <= row.ratio_stderr.max(1e-12), "{row:?}");
        }
    }
}
