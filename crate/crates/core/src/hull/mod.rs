//! Convex hulls of point clouds and the boundary/interior counts derived from them.

mod affine;
mod planar;
mod quickhull;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Relative tolerance for orientation tests, scaled by the cloud's extent.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Points in `R^dim`, stored row-major. Order is significant.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, coords: Vec::new() })
    }

    pub fn with_capacity(dim: usize, n: usize) -> Result<Self> {
        let mut cloud = Self::new(dim)?;
        cloud.coords.reserve(n * dim);
        Ok(cloud)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() % dim });
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(pos / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<I, R>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let mut cloud = Self::new(dim)?;
        for row in rows {
            cloud.push(row.as_ref())?;
        }
        Ok(cloud)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(self.len()));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Sub-cloud of the points with indices in `range`, order preserved.
    pub fn slice(&self, range: std::ops::Range<usize>) -> PointCloud {
        PointCloud {
            dim: self.dim,
            coords: self.coords[range.start * self.dim..range.end * self.dim].to_vec(),
        }
    }
}

/// A facet of a hull or polytope: a simplex given by indices into the owner's
/// vertex list, with its outward unit normal and offset (`normal · x = offset`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Convex hull of a point cloud plus the counts the volume estimators need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSummary {
    pub dim: usize,
    /// Cloud indices of the hull vertices. Counter-clockwise in 2D, ascending otherwise.
    pub vertex_indices: Vec<usize>,
    pub vertices: Vec<Vec<f64>>,
    /// Simplicial facets; empty when the hull is lower-dimensional.
    pub facets: Vec<Facet>,
    pub hull_volume: f64,
    pub n_total: usize,
    pub n_boundary: usize,
    pub n_interior: usize,
    pub tolerance: f64,
}

impl HullSummary {
    /// True when the hull has zero d-dimensional volume.
    pub fn is_degenerate(&self) -> bool {
        self.facets.is_empty()
    }

    /// Closed half-space membership within the hull tolerance. A degenerate
    /// hull has empty interior and contains nothing.
    pub fn contains(&self, x: &[f64]) -> bool {
        !self.is_degenerate() && self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + self.tolerance)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLabel {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HullAlgorithm {
    /// Monotone chain in the plane, quickhull elsewhere.
    #[default]
    Auto,
    /// Quickhull in every dimension, including the plane.
    Quickhull,
}

pub fn convex_hull(cloud: &PointCloud) -> Result<HullSummary> {
    convex_hull_with(cloud, HullAlgorithm::Auto)
}

pub fn convex_hull_with(cloud: &PointCloud, algorithm: HullAlgorithm) -> Result<HullSummary> {
    let dim = cloud.dim();
    let n = cloud.len();
    if n == 0 {
        return Ok(HullSummary {
            dim,
            vertex_indices: Vec::new(),
            vertices: Vec::new(),
            facets: Vec::new(),
            hull_volume: 0.0,
            n_total: 0,
            n_boundary: 0,
            n_interior: 0,
            tolerance: 0.0,
        });
    }
    let coords = cloud.as_flat();
    let tol = tolerance_for(coords, dim);
    let candidates = first_occurrences(coords, dim);
    let raw = hull_of(coords, dim, &candidates, tol, algorithm)?;

    let mut position = vec![usize::MAX; n];
    for (k, &v) in raw.vertices.iter().enumerate() {
        position[v] = k;
    }
    let facets = raw
        .facets
        .into_iter()
        .map(|f| Facet {
            vertices: f.verts.iter().map(|&v| position[v]).collect(),
            normal: f.normal,
            offset: f.offset,
        })
        .collect();
    let n_boundary = raw.vertices.len();
    Ok(HullSummary {
        dim,
        vertices: raw.vertices.iter().map(|&v| cloud.point(v).to_vec()).collect(),
        vertex_indices: raw.vertices,
        facets,
        hull_volume: raw.volume,
        n_total: n,
        n_boundary,
        n_interior: n - n_boundary,
        tolerance: tol,
    })
}

/// Boundary/interior label for every point of `cloud`, consistent with the counts in `hull`.
pub fn classify_points(cloud: &PointCloud, hull: &HullSummary) -> Result<Vec<PointLabel>> {
    if cloud.dim() != hull.dim {
        return Err(Error::DimensionMismatch { expected: hull.dim, found: cloud.dim() });
    }
    if cloud.len() != hull.n_total {
        return Err(Error::InvalidParameter(format!(
            "hull was built from {} points but the cloud has {}",
            hull.n_total,
            cloud.len()
        )));
    }
    let mut labels = vec![PointLabel::Interior; cloud.len()];
    for (&v, coords) in hull.vertex_indices.iter().zip(&hull.vertices) {
        if v >= cloud.len() || cloud.point(v) != coords.as_slice() {
            return Err(Error::InvalidParameter("hull vertices do not match the cloud".into()));
        }
        labels[v] = PointLabel::Boundary;
    }
    Ok(labels)
}

pub(crate) fn tolerance_for(coords: &[f64], dim: usize) -> f64 {
    let mut extent: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for k in 0..dim {
        let (lo, hi) = coords
            .iter()
            .skip(k)
            .step_by(dim)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        extent = extent.max(hi - lo);
        max_abs = max_abs.max(lo.abs()).max(hi.abs());
    }
    RELATIVE_TOLERANCE * extent + 16.0 * f64::EPSILON * max_abs
}

/// Indices of the points that are the first copy of their coordinates, ascending.
fn first_occurrences(coords: &[f64], dim: usize) -> Vec<usize> {
    let n = coords.len() / dim;
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let cmp = |a: usize, b: usize| {
        point(a)
            .iter()
            .zip(point(b))
            .map(|(x, y)| (x + 0.0).total_cmp(&(y + 0.0)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| cmp(a, b).then(a.cmp(&b)));
    order.dedup_by(|b, a| cmp(*a, *b) == Ordering::Equal);
    order.sort_unstable();
    order
}

/// Hull of distinct `candidates`. Lower-dimensional inputs are projected onto
/// their affine hull and the extreme points found there; their volume is 0.
fn hull_of(
    coords: &[f64],
    dim: usize,
    candidates: &[usize],
    tol: f64,
    algorithm: HullAlgorithm,
) -> Result<quickhull::RawHull> {
    if dim == 1 {
        return Ok(interval_hull(coords, candidates));
    }
    let frame = affine::affine_frame(coords, dim, candidates, tol);
    let rank = frame.rank();
    if rank == dim {
        if dim == 2 && algorithm == HullAlgorithm::Auto {
            return Ok(polygon_hull(coords, candidates, tol));
        }
        return quickhull::quickhull(coords, dim, candidates, &frame.simplex, tol);
    }
    if rank == 0 {
        return Ok(quickhull::RawHull { vertices: vec![candidates[0]], facets: Vec::new(), volume: 0.0 });
    }
    let projected = frame.project(coords, dim, candidates);
    let local: Vec<usize> = (0..candidates.len()).collect();
    let sub = hull_of(&projected, rank, &local, tol, algorithm)?;
    let mut vertices: Vec<usize> = sub.vertices.iter().map(|&k| candidates[k]).collect();
    vertices.sort_unstable();
    Ok(quickhull::RawHull { vertices, facets: Vec::new(), volume: 0.0 })
}

fn interval_hull(coords: &[f64], candidates: &[usize]) -> quickhull::RawHull {
    let lo = *candidates.iter().min_by(|&&a, &&b| coords[a].total_cmp(&coords[b]).then(a.cmp(&b))).unwrap();
    let hi = *candidates.iter().max_by(|&&a, &&b| coords[a].total_cmp(&coords[b]).then(b.cmp(&a))).unwrap();
    if coords[lo] == coords[hi] {
        return quickhull::RawHull { vertices: vec![lo], facets: Vec::new(), volume: 0.0 };
    }
    let mut vertices = vec![lo, hi];
    vertices.sort_unstable();
    quickhull::RawHull {
        vertices,
        facets: vec![
            quickhull::RawFacet { verts: vec![lo], normal: vec![-1.0], offset: -coords[lo] },
            quickhull::RawFacet { verts: vec![hi], normal: vec![1.0], offset: coords[hi] },
        ],
        volume: coords[hi] - coords[lo],
    }
}

fn polygon_hull(coords: &[f64], candidates: &[usize], tol: f64) -> quickhull::RawHull {
    let ring = planar::monotone_chain(coords, candidates, tol);
    let p = |i: usize| (coords[2 * i], coords[2 * i + 1]);
    let m = ring.len();
    let mut twice_area = 0.0;
    let mut facets = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (ring[k], ring[(k + 1) % m]);
        let (ax, ay) = p(a);
        let (bx, by) = p(b);
        twice_area += ax * by - ay * bx;
        let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
        let normal = vec![(by - ay) / len, -(bx - ax) / len];
        let offset = normal[0] * ax + normal[1] * ay;
        facets.push(quickhull::RawFacet { verts: vec![a, b], normal, offset });
    }
    quickhull::RawHull { vertices: ring, facets, volume: 0.5 * twice_area }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_with_centre() -> PointCloud {
        PointCloud::from_rows(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]]).unwrap()
    }

    #[test]
    fn square_with_centre_counts() {
        let h = convex_hull(&square_with_centre()).unwrap();
        assert!((h.hull_volume - 1.0).abs() < 1e-15);
        assert_eq!((h.n_boundary, h.n_interior, h.n_total), (4, 1, 5));
        let labels = classify_points(&square_with_centre(), &h).unwrap();
        assert_eq!(labels[4], PointLabel::Interior);
        assert_eq!(labels.iter().filter(|&&l| l == PointLabel::Boundary).count(), 4);
    }

    #[test]
    fn empty_cloud() {
        let h = convex_hull(&PointCloud::new(3).unwrap()).unwrap();
        assert_eq!((h.hull_volume, h.n_total, h.n_boundary), (0.0, 0, 0));
    }

    #[test]
    fn three_points_in_space_are_degenerate() {
        let cloud = PointCloud::from_rows(3, [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.3]]).unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert_eq!(h.hull_volume, 0.0);
        assert_eq!((h.n_boundary, h.n_interior), (3, 0));
        assert!(h.is_degenerate());
    }

    #[test]
    fn coplanar_cloud_in_space_counts_planar_extremes() {
        let cloud = PointCloud::from_rows(
            3,
            [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [0.5, 0.5, 1.0]],
        )
        .unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert_eq!(h.hull_volume, 0.0);
        assert_eq!(h.vertex_indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn collinear_points_label_endpoints() {
        let cloud = PointCloud::from_rows(2, [[0.5, 0.5], [0.0, 0.0], [2.0, 2.0], [1.0, 1.0]]).unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert_eq!(h.hull_volume, 0.0);
        let labels = classify_points(&cloud, &h).unwrap();
        assert_eq!(
            labels,
            vec![PointLabel::Interior, PointLabel::Boundary, PointLabel::Boundary, PointLabel::Interior]
        );
    }

    #[test]
    fn duplicate_vertex_second_copy_is_interior() {
        let cloud = PointCloud::from_rows(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let h = convex_hull(&cloud).unwrap();
        let labels = classify_points(&cloud, &h).unwrap();
        assert_eq!(labels[1], PointLabel::Boundary);
        assert_eq!(labels[3], PointLabel::Interior);
        assert_eq!((h.n_boundary, h.n_interior), (3, 1));
    }

    #[test]
    fn duplicates_in_three_dimensions() {
        let cloud = PointCloud::from_rows(
            3,
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.1, 0.1, 0.1]],
        )
        .unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert_eq!(h.vertex_indices, vec![0, 1, 2, 3]);
        assert_eq!(h.n_interior, 2);
        assert!((h.hull_volume - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn unit_cube_corners_and_centre() {
        let mut rows = Vec::new();
        for mask in 0..8u32 {
            rows.push([(mask & 1) as f64, ((mask >> 1) & 1) as f64, ((mask >> 2) & 1) as f64]);
        }
        rows.push([0.5, 0.5, 0.5]);
        let cloud = PointCloud::from_rows(3, rows).unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert!((h.hull_volume - 1.0).abs() < 1e-12);
        assert_eq!(h.n_boundary, 8);
        for p in cloud.iter() {
            assert!(h.contains(p));
        }
    }

    #[test]
    fn one_dimensional_interval() {
        let cloud = PointCloud::from_rows(1, [[0.3], [-1.0], [2.0], [0.0]]).unwrap();
        let h = convex_hull(&cloud).unwrap();
        assert_eq!(h.hull_volume, 3.0);
        assert_eq!(h.vertex_indices, vec![1, 2]);
        assert!(h.contains(&[1.5]));
        assert!(!h.contains(&[2.5]));
    }

    #[test]
    fn quickhull_agrees_on_planar_square() {
        let h = convex_hull_with(&square_with_centre(), HullAlgorithm::Quickhull).unwrap();
        assert!((h.hull_volume - 1.0).abs() < 1e-14);
        assert_eq!(h.vertex_indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_mismatched_and_non_finite_rows() {
        let mut cloud = PointCloud::new(2).unwrap();
        assert!(matches!(cloud.push(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(cloud.push(&[f64::NAN, 0.0]), Err(Error::NonFinite(0))));
    }

    #[test]
    fn classify_rejects_foreign_hull() {
        let h = convex_hull(&square_with_centre()).unwrap();
        let other = PointCloud::from_rows(2, [[0.0, 0.0]]).unwrap();
        assert!(classify_points(&other, &h).is_err());
    }
}
