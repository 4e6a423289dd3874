//! Convex body models with exact volume and containment, plus the dilation and
//! symmetric-difference machinery used for the set estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{convex_hull, Facet, HullSummary, PointCloud};
use crate::linalg::{det_in_place, dot, factorial, inverse};
use crate::rng::RngStream;

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = 2π/d · V_{d-2}
    let mut even = 1.0;
    let mut odd = 2.0;
    let mut k = 0;
    while k + 2 <= d {
        k += 2;
        even *= 2.0 * std::f64::consts::PI / k as f64;
        if k + 1 <= d {
            odd *= 2.0 * std::f64::consts::PI / (k + 1) as f64;
        }
    }
    if d % 2 == 0 {
        even
    } else {
        odd
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} has non-finite entries")))
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        check_finite(&lower, "box lower corner")?;
        check_finite(&upper, "box upper corner")?;
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::Degenerate(format!("box side {i} has lower >= upper")));
        }
        Ok(Self { lower, upper })
    }

    /// `[0, 1]^d`.
    pub fn unit(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d], vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a.min(*b)).collect(),
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub(crate) fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        for ((x, l), u) in out.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = l + (u - l) * rng.uniform();
        }
    }
}

/// `{ center + A u : |u| <= 1 }` for an invertible `d × d` matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vec<f64>,
    axes: Vec<f64>,
    inverse: Vec<f64>,
    volume: f64,
}

impl Ellipsoid {
    /// `axes` is given row by row.
    pub fn new(center: Vec<f64>, axes: Vec<Vec<f64>>) -> Result<Self> {
        let d = center.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_finite(&center, "ellipsoid center")?;
        check_dim(d, axes.len())?;
        for row in &axes {
            check_dim(d, row.len())?;
            check_finite(row, "ellipsoid axes")?;
        }
        let flat: Vec<f64> = axes.into_iter().flatten().collect();
        let det = det_in_place(&mut flat.clone(), d);
        let inverse = inverse(&flat, d).filter(|_| det != 0.0 && det.is_finite());
        let inverse = inverse.ok_or_else(|| Error::Degenerate("ellipsoid axes matrix is singular".into()))?;
        Ok(Self { volume: det.abs() * unit_ball_volume(d), center, axes: flat, inverse })
    }

    /// Euclidean ball.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let d = center.len();
        let axes = (0..d).map(|i| (0..d).map(|j| if i == j { radius } else { 0.0 }).collect()).collect();
        Self::new(center, axes)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn axes(&self) -> Vec<Vec<f64>> {
        self.axes.chunks_exact(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let d = self.dim();
        let mut r2 = 0.0;
        for i in 0..d {
            let row = &self.inverse[i * d..(i + 1) * d];
            let u: f64 = row.iter().zip(p.iter().zip(&self.center)).map(|(a, (x, c))| a * (x - c)).sum();
            r2 += u * u;
        }
        r2 <= 1.0 + 1e-12
    }

    pub fn bounding_box(&self) -> AxisBox {
        let d = self.dim();
        let half: Vec<f64> = self.axes.chunks_exact(d).map(|row| dot(row, row).sqrt()).collect();
        AxisBox {
            lower: self.center.iter().zip(&half).map(|(c, h)| c - h).collect(),
            upper: self.center.iter().zip(&half).map(|(c, h)| c + h).collect(),
        }
    }

    /// Image of a point of the unit ball.
    pub(crate) fn map_from_ball(&self, u: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for i in 0..d {
            out[i] = self.center[i] + dot(&self.axes[i * d..(i + 1) * d], u);
        }
    }
}

/// Where a polytope is dilated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centre {
    /// Coordinate-wise mean of the vertices.
    #[default]
    VertexMean,
    /// Volumetric centroid.
    Centroid,
}

/// Full-dimensional convex polytope held as its vertex set and simplicial facets.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    volume: f64,
    tolerance: f64,
}

impl Polytope {
    /// Hull of `points`; non-extreme points are dropped.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::Degenerate("polytope without vertices".into()))?;
        let cloud = PointCloud::from_rows(dim, &points)?;
        Self::from_hull(&convex_hull(&cloud)?)
    }

    pub fn from_hull(hull: &HullSummary) -> Result<Self> {
        if hull.is_degenerate() {
            return Err(Error::Degenerate(format!(
                "hull of {} points has zero {}-dimensional volume",
                hull.n_total, hull.dim
            )));
        }
        let mut poly = Self {
            dim: hull.dim,
            vertices: hull.vertices.clone(),
            facets: hull.facets.clone(),
            volume: 0.0,
            tolerance: hull.tolerance,
        };
        poly.volume = poly.fan_volume(&barycentre(&poly.vertices)?);
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, p) <= f.offset + self.tolerance)
    }

    pub fn bounding_box(&self) -> AxisBox {
        let mut lower = self.vertices[0].clone();
        let mut upper = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for k in 0..self.dim {
                lower[k] = lower[k].min(v[k]);
                upper[k] = upper[k].max(v[k]);
            }
        }
        AxisBox { lower, upper }
    }

    pub fn centre(&self, which: Centre) -> Vec<f64> {
        match which {
            Centre::VertexMean => barycentre(&self.vertices).expect("polytope has vertices"),
            Centre::Centroid => self.centroid(),
        }
    }

    /// Volumetric centroid from the fan triangulation.
    pub fn centroid(&self) -> Vec<f64> {
        let apex = barycentre(&self.vertices).expect("polytope has vertices");
        let d = self.dim;
        let mut acc = vec![0.0; d];
        let mut total = 0.0;
        for f in &self.facets {
            let w = self.cone_volume(f, &apex);
            total += w;
            for k in 0..d {
                let s: f64 = f.vertices.iter().map(|&v| self.vertices[v][k]).sum::<f64>() + apex[k];
                acc[k] += w * s / (d + 1) as f64;
            }
        }
        acc.iter().map(|a| a / total).collect()
    }

    fn cone_volume(&self, facet: &Facet, apex: &[f64]) -> f64 {
        let d = self.dim;
        let mut m = Vec::with_capacity(d * d);
        for &v in &facet.vertices {
            m.extend(self.vertices[v].iter().zip(apex).map(|(x, a)| x - a));
        }
        det_in_place(&mut m, d).abs() / factorial(d)
    }

    /// Sum of the simplices joining `apex` to every facet; exact for interior apexes.
    fn fan_volume(&self, apex: &[f64]) -> f64 {
        self.facets.iter().map(|f| self.cone_volume(f, apex)).sum()
    }
}

/// Any of the supported convex body models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub enum ConvexBody {
    Box(AxisBox),
    Ellipsoid(Ellipsoid),
    Polytope(Polytope),
}

impl ConvexBody {
    pub fn unit_cube(d: usize) -> Result<Self> {
        Ok(Self::Box(AxisBox::unit(d)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box(b) => b.dim(),
            Self::Ellipsoid(e) => e.dim(),
            Self::Polytope(p) => p.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::Box(b) => b.volume(),
            Self::Ellipsoid(e) => e.volume(),
            Self::Polytope(p) => p.volume(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        check_dim(self.dim(), p.len())?;
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &[f64]) -> bool {
        match self {
            Self::Box(b) => b.contains(p),
            Self::Ellipsoid(e) => e.contains(p),
            Self::Polytope(poly) => poly.contains(p),
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            Self::Box(b) => b.clone(),
            Self::Ellipsoid(e) => e.bounding_box(),
            Self::Polytope(p) => p.bounding_box(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Box(_) => "box",
            Self::Ellipsoid(_) => "ellipsoid",
            Self::Polytope(_) => "polytope",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// JSON form of a body: `{"kind": "box" | "ellipsoid" | "polytope", ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ellipsoid { center: Vec<f64>, axes: Vec<Vec<f64>> },
    Polytope { vertices: Vec<Vec<f64>> },
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        Ok(match spec {
            BodySpec::Box { lower, upper } => ConvexBody::Box(AxisBox::new(lower, upper)?),
            BodySpec::Ellipsoid { center, axes } => ConvexBody::Ellipsoid(Ellipsoid::new(center, axes)?),
            BodySpec::Polytope { vertices } => {
                let d = vertices.first().map_or(0, Vec::len);
                if d == 0 {
                    return Err(Error::Degenerate("polytope needs at least one non-empty vertex".into()));
                }
                for v in &vertices {
                    check_dim(d, v.len())?;
                }
                ConvexBody::Polytope(Polytope::new(vertices)?)
            }
        })
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        match body {
            ConvexBody::Box(b) => BodySpec::Box { lower: b.lower, upper: b.upper },
            ConvexBody::Ellipsoid(e) => BodySpec::Ellipsoid { axes: e.axes(), center: e.center },
            ConvexBody::Polytope(p) => BodySpec::Polytope { vertices: p.vertices },
        }
    }
}

/// Coordinate-wise mean of `vertices`.
pub fn barycentre(vertices: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = vertices.first().ok_or_else(|| Error::InvalidParameter("barycentre of an empty set".into()))?;
    let d = first.len();
    let mut acc = vec![0.0; d];
    for v in vertices {
        check_dim(d, v.len())?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = vertices.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Maps every point `v` of `poly` to `center + factor · (v − center)`.
///
/// Facet planes are transformed alongside the vertices and the volume is
/// re-triangulated from the new vertex set, so it is computed rather than
/// assumed to be `factor^d` times the old one.
pub fn dilate(poly: &Polytope, center: &[f64], factor: f64) -> Result<Polytope> {
    check_dim(poly.dim, center.len())?;
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {factor}")));
    }
    let vertices: Vec<Vec<f64>> = poly
        .vertices
        .iter()
        .map(|v| v.iter().zip(center).map(|(x, c)| c + factor * (x - c)).collect())
        .collect();
    let facets = poly
        .facets
        .iter()
        .map(|f| {
            let nc = dot(&f.normal, center);
            Facet { vertices: f.vertices.clone(), normal: f.normal.clone(), offset: nc + factor * (f.offset - nc) }
        })
        .collect();
    let mut out = Polytope { dim: poly.dim, vertices, facets, volume: 0.0, tolerance: poly.tolerance * factor };
    out.volume = out.fan_volume(&barycentre(&out.vertices)?);
    Ok(out)
}

/// Monte Carlo estimate of `|a Δ b|` from uniform draws on the bounding box of
/// `a ∪ b`. Returns `(estimate, standard error)`.
pub fn symdiff_volume(a: &ConvexBody, b: &Polytope, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    symdiff_volume_with(a, b, n_samples, &mut RngStream::new(seed, 0))
}

pub fn symdiff_volume_with(a: &ConvexBody, b: &Polytope, n_samples: usize, rng: &mut RngStream) -> Result<(f64, f64)> {
    check_dim(a.dim(), b.dim())?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("symmetric difference needs at least one sample".into()));
    }
    let frame = a.bounding_box().union(&b.bounding_box());
    let mut x = vec![0.0; a.dim()];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        frame.sample_into(rng, &mut x);
        if a.contains_unchecked(&x) != b.contains(&x) {
            hits += 1;
        }
    }
    Ok(proportion_estimate(frame.volume(), hits, n_samples))
}

pub(crate) fn proportion_estimate(frame_volume: f64, hits: usize, n: usize) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (frame_volume * p, frame_volume * (p * (1.0 - p) / n as f64).sqrt())
}
