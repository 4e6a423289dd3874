//! Volume estimators built from the convex hull of the observed points.
//!
//! Every estimator except Gayraud's is a function of the hull summary
//! (`|Ĉ|`, `N`, `N∂`, `N∘`) and, for the oracle-type ones, the intensity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dilate, Centre, Polytope};
use crate::hull::{convex_hull, HullSummary, PointCloud};
use crate::ppp::check_intensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    NaiveHull,
    NaiveCount,
    Oracle,
    Plugin,
    Final,
    Pseudo,
    Gayraud,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 7] = [
        EstimatorId::NaiveHull,
        EstimatorId::NaiveCount,
        EstimatorId::Oracle,
        EstimatorId::Plugin,
        EstimatorId::Final,
        EstimatorId::Pseudo,
        EstimatorId::Gayraud,
    ];

    /// Whether the estimator needs the intensity to be known.
    pub fn uses_intensity(self) -> bool {
        matches!(self, EstimatorId::NaiveCount | EstimatorId::Oracle | EstimatorId::Pseudo)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorId::NaiveHull => "naive_hull",
            EstimatorId::NaiveCount => "naive_count",
            EstimatorId::Oracle => "oracle",
            EstimatorId::Plugin => "plugin",
            EstimatorId::Final => "final",
            EstimatorId::Pseudo => "pseudo",
            EstimatorId::Gayraud => "gayraud",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: EstimatorId,
    pub value: f64,
    pub used_intensity: bool,
    /// Set when the estimator fell back to a degenerate rule (Gayraud with fewer than 3 points).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl Estimate {
    fn new(estimator: EstimatorId, value: f64) -> Self {
        Estimate { estimator, value, used_intensity: estimator.uses_intensity(), degenerate: false }
    }
}

/// `|Ĉ|`.
pub fn naive_hull(h: &HullSummary) -> Estimate {
    Estimate::new(EstimatorId::NaiveHull, h.hull_volume)
}

/// `N / λ`.
pub fn naive_count(n_total: usize, intensity: f64) -> Result<Estimate> {
    check_intensity(intensity)?;
    Ok(Estimate::new(EstimatorId::NaiveCount, n_total as f64 / intensity))
}

/// UMVU estimator for known intensity: `|Ĉ| + N∂ / λ`.
pub fn oracle(h: &HullSummary, intensity: f64) -> Result<Estimate> {
    check_intensity(intensity)?;
    Ok(Estimate::new(EstimatorId::Oracle, h.hull_volume + h.n_boundary as f64 / intensity))
}

/// Intensity replaced by its maximum-likelihood estimate `N / |Ĉ|`: `|Ĉ| (1 + N∂ / N)`, 0 for an empty cloud.
pub fn plugin(h: &HullSummary) -> Estimate {
    let value = if h.n_total == 0 {
        0.0
    } else {
        h.hull_volume * (1.0 + h.n_boundary as f64 / h.n_total as f64)
    };
    Estimate::new(EstimatorId::Plugin, value)
}

/// Intensity-free, nearly unbiased: `(N + 1) / (N∘ + 1) · |Ĉ|`.
pub fn final_estimate(h: &HullSummary) -> Estimate {
    let value = (h.n_total + 1) as f64 / (h.n_interior + 1) as f64 * h.hull_volume;
    Estimate::new(EstimatorId::Final, value)
}

/// Exactly unbiased companion of [`final_estimate`] that needs the intensity:
/// `|Ĉ| + |Ĉ| N∂ / (N∘ + 1) + N∂ e^{-λ|Ĉ|} / λ`.
///
/// The last term is `|Ĉ| N∂ e^{-λ∘} / λ∘` with `λ∘ = λ|Ĉ|` rewritten so that it
/// stays finite at `|Ĉ| = 0`.
pub fn pseudo(h: &HullSummary, intensity: f64) -> Result<Estimate> {
    check_intensity(intensity)?;
    let vol = h.hull_volume;
    let nb = h.n_boundary as f64;
    let value = vol + vol * nb / (h.n_interior + 1) as f64 + nb * (-intensity * vol).exp() / intensity;
    Ok(Estimate::new(EstimatorId::Pseudo, value))
}

/// Sample-splitting estimator: `|Ĉ| + |Ĉ″| / N* · #{X′ᵢ ∉ Ĉ}`.
///
/// With `N* = ⌊N/3⌋`, the hull sample `X` is the first `N* + (N mod 3)` points,
/// `X′` the next `N*` and `X″` the last `N*`. For `N < 3` the correction is
/// dropped, the value is the volume of the whole cloud's hull and the estimate
/// is flagged degenerate.
pub fn gayraud(cloud: &PointCloud) -> Result<Estimate> {
    let n = cloud.len();
    let part = n / 3;
    if part == 0 {
        let h = convex_hull(cloud)?;
        let mut e = Estimate::new(EstimatorId::Gayraud, h.hull_volume);
        e.degenerate = true;
        return Ok(e);
    }
    let head = part + n % 3;
    let hull_sample = convex_hull(&cloud.slice(0..head))?;
    let volume_sample = convex_hull(&cloud.slice(head + part..n))?;
    let missed = (head..head + part).filter(|&i| !hull_sample.contains(cloud.point(i))).count();
    let value = hull_sample.hull_volume + volume_sample.hull_volume / part as f64 * missed as f64;
    Ok(Estimate::new(EstimatorId::Gayraud, value))
}

/// Evaluates `id`, returning `None` when it needs an intensity that was not given.
pub fn evaluate(
    id: EstimatorId,
    h: &HullSummary,
    cloud: &PointCloud,
    intensity: Option<f64>,
) -> Result<Option<Estimate>> {
    let est = match (id, intensity) {
        (EstimatorId::NaiveHull, _) => naive_hull(h),
        (EstimatorId::Plugin, _) => plugin(h),
        (EstimatorId::Final, _) => final_estimate(h),
        (EstimatorId::Gayraud, _) => gayraud(cloud)?,
        (EstimatorId::NaiveCount, Some(l)) => naive_count(h.n_total, l)?,
        (EstimatorId::Oracle, Some(l)) => oracle(h, l)?,
        (EstimatorId::Pseudo, Some(l)) => pseudo(h, l)?,
        (_, None) => return Ok(None),
    };
    Ok(Some(est))
}

/// Multiplier taking `|Ĉ|` to the final estimate, as a length ratio: `((N+1)/(N∘+1))^{1/d}`.
pub fn dilation_factor(h: &HullSummary) -> f64 {
    ((h.n_total + 1) as f64 / (h.n_interior + 1) as f64).powf(1.0 / h.dim as f64)
}

/// Set estimator: the hull dilated about its vertex barycentre so that its
/// volume equals the final estimate.
pub fn dilated_hull(h: &HullSummary) -> Result<Polytope> {
    dilated_hull_with(h, Centre::VertexMean)
}

pub fn dilated_hull_with(h: &HullSummary, centre: Centre) -> Result<Polytope> {
    let poly = Polytope::from_hull(h)?;
    dilate(&poly, &poly.centre(centre), dilation_factor(h))
}
