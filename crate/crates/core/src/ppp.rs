//! Simulation of a homogeneous Poisson point process restricted to a convex body.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::hull::PointCloud;
use crate::rng::RngStream;

/// Consecutive bounding-box rejections tolerated when sampling a polytope.
pub const REJECTION_CAP: u64 = 1_000_000;

/// Means below this use sequential-search inversion, above it PTRS.
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PppConfig {
    pub body: ConvexBody,
    /// Expected points per unit volume.
    pub intensity: f64,
    pub seed: u64,
}

impl PppConfig {
    pub fn validate(&self) -> Result<()> {
        check_intensity(self.intensity)?;
        if !(self.body.volume() > 0.0) {
            return Err(Error::Degenerate("body has zero volume".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_intensity(intensity: f64) -> Result<()> {
    if intensity > 0.0 && intensity.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("intensity must be positive and finite, got {intensity}")))
    }
}

/// One Poisson draw with the given mean.
pub fn sample_poisson(mean: f64, rng: &mut RngStream) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    Ok(if mean < INVERSION_LIMIT { poisson_inversion(mean, rng) } else { poisson_ptrs(mean, rng) })
}

fn poisson_inversion(mean: f64, rng: &mut RngStream) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // the remaining tail is below double precision
            break;
        }
        cdf = next;
    }
    k
}

/// Hörmann's transformed rejection with squeeze (PTRS).
fn poisson_ptrs(mean: f64, rng: &mut RngStream) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        if lhs <= -mean + k * loglam - ln_factorial(k as u64) {
            return k as u64;
        }
    }
}

/// `ln(k!)`: exact table below 10, Stirling series above.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    const TABLE: [f64; 10] = [
        0.0,
        0.0,
        std::f64::consts::LN_2,
        1.791_759_469_228_055,
        3.178_053_830_347_945_7,
        4.787_491_742_782_046,
        6.579_251_212_010_101,
        8.525_161_361_065_415,
        10.604_602_902_745_25,
        12.801_827_480_081_469,
    ];
    if k < 10 {
        return TABLE[k as usize];
    }
    let x = k as f64 + 1.0;
    let x2 = x * x;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * x2)) / x2) / x
}

/// One point uniformly distributed on `body`.
pub fn sample_uniform(body: &ConvexBody, rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut out = vec![0.0; body.dim()];
    sample_uniform_into(body, rng, &mut out)?;
    Ok(out)
}

pub fn sample_uniform_into(body: &ConvexBody, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
    let d = body.dim();
    if out.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: out.len() });
    }
    match body {
        ConvexBody::Box(b) => b.sample_into(rng, out),
        ConvexBody::Ellipsoid(e) => {
            let u = unit_ball_point(d, rng);
            e.map_from_ball(&u, out);
        }
        ConvexBody::Polytope(p) => {
            let frame = p.bounding_box();
            let mut rejected = 0;
            loop {
                frame.sample_into(rng, out);
                if p.contains(out) {
                    break;
                }
                rejected += 1;
                if rejected >= REJECTION_CAP {
                    return Err(Error::RejectionCap(REJECTION_CAP));
                }
            }
        }
    }
    Ok(())
}

/// Uniform point in the unit ball: Gaussian direction, radius `U^{1/d}`.
fn unit_ball_point(d: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = rng.uniform().powf(1.0 / d as f64);
            return g.into_iter().map(|x| x * r / norm).collect();
        }
    }
}

/// Realisation of the process on `config.body`, drawn from stream 0 of the seed.
pub fn sample_ppp(config: &PppConfig) -> Result<PointCloud> {
    config.validate()?;
    sample_ppp_with(&config.body, config.intensity, &mut RngStream::new(config.seed, 0))
}

/// `N ~ Poisson(intensity · |body|)` followed by `N` independent uniform points.
pub fn sample_ppp_with(body: &ConvexBody, intensity: f64, rng: &mut RngStream) -> Result<PointCloud> {
    check_intensity(intensity)?;
    let n = sample_poisson(intensity * body.volume(), rng)? as usize;
    let d = body.dim();
    let mut coords = vec![0.0; n * d];
    for chunk in coords.chunks_exact_mut(d) {
        sample_uniform_into(body, rng, chunk)?;
    }
    PointCloud::from_flat(d, coords)
}
