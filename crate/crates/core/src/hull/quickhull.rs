//! Quickhull in general dimension with simplicial facets.
//!
//! Facets are oriented against a fixed interior point (the centroid of the
//! initial simplex). A point is processed only when it lies more than `tol`
//! above some facet, so points within tolerance of the boundary are never
//! promoted to vertices.
//!
//! A facet created across a horizon ridge gets its normal by rotating the
//! dying facet's hyperplane about that ridge: the new normal lies in the span
//! of the two normals meeting there. Normals, offsets and areas of the final
//! facets are recomputed from their vertices.

use crate::error::{Error, Result};
use crate::linalg::{dot, factorial, hyperplane_normal};

const NONE: usize = usize::MAX;
/// Ridge-table markers, stored in the facet field.
const EMPTY: usize = usize::MAX;
const PAIRED: usize = usize::MAX - 1;

pub(crate) struct RawFacet {
    pub verts: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

pub(crate) struct RawHull {
    /// Point indices of the hull vertices, ascending.
    pub vertices: Vec<usize>,
    pub facets: Vec<RawFacet>,
    pub volume: f64,
}

/// Facet table in structure-of-arrays form; per-facet rows have stride `dim`.
struct Builder<'a> {
    coords: &'a [f64],
    dim: usize,
    tol: f64,
    interior: Vec<f64>,

    verts: Vec<usize>,
    /// Row `f`, slot `i`: the facet sharing every vertex of `f` except `verts[f][i]`.
    neighbors: Vec<usize>,
    normals: Vec<f64>,
    offsets: Vec<f64>,
    alive: Vec<bool>,
    outside: Vec<Vec<usize>>,
    furthest: Vec<(usize, f64)>,
    /// Slots of deleted facets, reused before the table grows.
    free: Vec<usize>,

    edges: Vec<f64>,
    normal: Vec<f64>,
}

impl<'a> Builder<'a> {
    fn len(&self) -> usize {
        self.offsets.len()
    }

    fn point(&self, i: usize) -> &'a [f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn facet_verts(&self, f: usize) -> &[usize] {
        &self.verts[f * self.dim..(f + 1) * self.dim]
    }

    fn distance(&self, f: usize, p: usize) -> f64 {
        let d = self.dim;
        dot(&self.normals[f * d..(f + 1) * d], self.point(p)) - self.offsets[f]
    }

    /// Normal of the hyperplane through `verts`, from scratch. Returns `(d-1)!` times the facet area.
    fn exact_normal(&mut self, verts: &[usize]) -> Result<f64> {
        let base = self.point(verts[0]);
        self.edges.clear();
        for &v in &verts[1..] {
            let p = self.point(v);
            self.edges.extend(p.iter().zip(base).map(|(a, b)| a - b));
        }
        let area_scale = hyperplane_normal(&mut self.edges, self.dim, &mut self.normal);
        if !(area_scale > 0.0) || !area_scale.is_finite() {
            return Err(Error::Numerical("zero-area facet"));
        }
        Ok(area_scale)
    }

    /// Normal of the hyperplane through the ridge shared by facets `f` and `nb`
    /// and the point `apex`; `r` is a vertex of that ridge. Returns false when
    /// the combination cancels too badly to trust.
    fn rotated_normal(&mut self, f: usize, nb: usize, apex: usize, r: usize) -> bool {
        let d = self.dim;
        let (a, r) = (self.point(apex), self.point(r));
        let (nf, nn) = (&self.normals[f * d..(f + 1) * d], &self.normals[nb * d..(nb + 1) * d]);
        let (mut sf, mut sn) = (0.0, 0.0);
        for i in 0..d {
            let u = a[i] - r[i];
            sf += nf[i] * u;
            sn += nn[i] * u;
        }
        let mut len2 = 0.0;
        for i in 0..d {
            let x = sn * nf[i] - sf * nn[i];
            self.normal[i] = x;
            len2 += x * x;
        }
        if !(len2 > 0.01 * (sf * sf + sn * sn)) {
            return false;
        }
        let len = len2.sqrt();
        for x in self.normal.iter_mut() {
            *x /= len;
        }
        true
    }

    /// Adds a facet on `verts`; `rotate` is `(dying facet, horizon neighbour, apex slot)`.
    fn make_facet(&mut self, verts: &[usize], rotate: Option<(usize, usize, usize)>) -> Result<usize> {
        let d = self.dim;
        let rotated = match rotate {
            Some((f, nb, k)) => self.rotated_normal(f, nb, verts[k], verts[(k + 1) % d]),
            None => false,
        };
        if !rotated {
            self.exact_normal(verts)?;
        }
        let anchor = match rotate {
            Some((_, _, k)) => verts[k],
            None => verts[0],
        };
        let mut offset = dot(&self.normal, self.point(anchor));
        if dot(&self.normal, &self.interior) > offset {
            for x in self.normal.iter_mut() {
                *x = -*x;
            }
            offset = -offset;
        }
        if let Some(f) = self.free.pop() {
            self.verts[f * d..(f + 1) * d].copy_from_slice(verts);
            self.neighbors[f * d..(f + 1) * d].fill(NONE);
            self.normals[f * d..(f + 1) * d].copy_from_slice(&self.normal);
            self.offsets[f] = offset;
            self.alive[f] = true;
            self.outside[f].clear();
            self.furthest[f] = (NONE, 0.0);
            return Ok(f);
        }
        self.verts.extend_from_slice(verts);
        self.neighbors.extend(std::iter::repeat_n(NONE, d));
        self.normals.extend_from_slice(&self.normal);
        self.offsets.push(offset);
        self.alive.push(true);
        self.outside.push(Vec::new());
        self.furthest.push((NONE, 0.0));
        Ok(self.len() - 1)
    }

    /// Hands `p` to the first facet in `targets` it lies strictly above.
    fn assign(&mut self, p: usize, targets: &[usize]) {
        for &f in targets {
            let dist = self.distance(f, p);
            if dist > self.tol {
                if dist > self.furthest[f].1 {
                    self.furthest[f] = (p, dist);
                }
                self.outside[f].push(p);
                return;
            }
        }
    }

    /// Do the ridges of `a` without slot `i` and of `b` without slot `j` have the same vertices?
    fn same_ridge(&self, a: usize, i: usize, b: usize, j: usize) -> bool {
        let va = self.facet_verts(a);
        let vb = self.facet_verts(b);
        va.iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .all(|(_, v)| vb.iter().enumerate().any(|(k, w)| k != j && w == v))
    }
}

fn mix(v: usize) -> u64 {
    let mut z = (v as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hull of `candidates`, which must affinely span all `dim` dimensions;
/// `simplex` holds `dim + 1` affinely independent candidates.
pub(crate) fn quickhull(
    coords: &[f64],
    dim: usize,
    candidates: &[usize],
    simplex: &[usize],
    tol: f64,
) -> Result<RawHull> {
    assert!(dim >= 2 && simplex.len() == dim + 1);
    let d = dim;
    let mut interior = vec![0.0; d];
    for &s in simplex {
        for (acc, x) in interior.iter_mut().zip(&coords[s * d..(s + 1) * d]) {
            *acc += x;
        }
    }
    for x in interior.iter_mut() {
        *x /= (d + 1) as f64;
    }
    let mut b = Builder {
        coords,
        dim,
        tol,
        interior,
        verts: Vec::new(),
        neighbors: Vec::new(),
        normals: Vec::new(),
        offsets: Vec::new(),
        alive: Vec::new(),
        outside: Vec::new(),
        furthest: Vec::new(),
        free: Vec::new(),
        edges: Vec::with_capacity(d * d),
        normal: vec![0.0; d],
    };

    // facet i omits simplex[i]; its neighbour across simplex[j] is facet j
    let mut verts = Vec::with_capacity(d);
    for i in 0..=d {
        verts.clear();
        verts.extend(simplex.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &s)| s));
        b.make_facet(&verts, None)?;
    }
    for i in 0..=d {
        for (slot, k) in (0..=d).filter(|&k| k != i).enumerate() {
            b.neighbors[i * d + slot] = k;
        }
    }

    let initial: Vec<usize> = (0..=d).collect();
    for &p in candidates {
        if !simplex.contains(&p) {
            b.assign(p, &initial);
        }
    }

    let mut pending: Vec<usize> = initial.iter().copied().filter(|&f| !b.outside[f].is_empty()).collect();
    // seen[f] == epoch: f was classified while processing the current apex
    let mut seen: Vec<u32> = Vec::new();
    let mut is_visible: Vec<bool> = Vec::new();
    let mut epoch: u32 = 0;
    let mut visible: Vec<usize> = Vec::new();
    let mut new_facets: Vec<usize> = Vec::new();
    let mut ridges: Vec<(u64, usize, usize)> = Vec::new();
    let mut table: Vec<(u64, usize, usize)> = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    let mut orphans: Vec<usize> = Vec::new();

    while let Some(start) = pending.pop() {
        if !b.alive[start] || b.outside[start].is_empty() {
            continue;
        }
        let apex = b.furthest[start].0;
        epoch += 1;
        seen.resize(b.len(), 0);
        is_visible.resize(b.len(), false);

        visible.clear();
        visible.push(start);
        seen[start] = epoch;
        is_visible[start] = true;
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for k in 0..d {
                let nb = b.neighbors[f * d + k];
                if seen[nb] == epoch {
                    continue;
                }
                seen[nb] = epoch;
                let vis = b.distance(nb, apex) > tol;
                is_visible[nb] = vis;
                if vis {
                    visible.push(nb);
                }
            }
        }

        new_facets.clear();
        ridges.clear();
        for &f in &visible {
            for k in 0..d {
                let nb = b.neighbors[f * d + k];
                if is_visible[nb] {
                    continue;
                }
                verts.clear();
                verts.extend_from_slice(b.facet_verts(f));
                verts[k] = apex;
                let nf = b.make_facet(&verts, Some((f, nb, k)))?;
                new_facets.push(nf);
                b.neighbors[nf * d + k] = nb;
                let slot = (0..d)
                    .find(|&s| b.neighbors[nb * d + s] == f)
                    .ok_or_else(|| Error::Numerical("broken facet adjacency"))?;
                b.neighbors[nb * d + slot] = nf;

                let total = verts.iter().fold(0u64, |acc, &v| acc.wrapping_add(mix(v)));
                for (j, &v) in verts.iter().enumerate() {
                    if j != k {
                        ridges.push((total.wrapping_sub(mix(v)), nf, j));
                    }
                }
            }
        }
        for f in &visible {
            is_visible[*f] = false;
        }

        // pair up ridges through an open-addressing table; hash collisions are
        // resolved by comparing vertices
        let size = (2 * ridges.len()).next_power_of_two().max(16);
        if table.len() < size {
            table.resize(size, (0, EMPTY, 0));
        }
        let mask = size - 1;
        let mut open = 0usize;
        for &(h, fa, ia) in &ridges {
            let mut i = h as usize & mask;
            loop {
                let (hb, fb, ib) = table[i];
                if fb == EMPTY {
                    table[i] = (h, fa, ia);
                    used.push(i);
                    open += 1;
                    break;
                }
                if fb != PAIRED && hb == h && b.same_ridge(fa, ia, fb, ib) {
                    b.neighbors[fa * d + ia] = fb;
                    b.neighbors[fb * d + ib] = fa;
                    table[i].1 = PAIRED;
                    open -= 1;
                    break;
                }
                i = (i + 1) & mask;
            }
        }
        for &i in &used {
            table[i] = (0, EMPTY, 0);
        }
        used.clear();
        if open != 0 {
            return Err(Error::Numerical("unmatched horizon ridge"));
        }

        orphans.clear();
        for &f in &visible {
            b.alive[f] = false;
            orphans.append(&mut b.outside[f]);
            b.free.push(f);
        }
        for &p in &orphans {
            if p != apex {
                b.assign(p, &new_facets);
            }
        }
        for &nf in &new_facets {
            if !b.outside[nf].is_empty() {
                pending.push(nf);
            }
        }
    }

    let scale = factorial(d);
    let mut volume = 0.0;
    let mut vertices = Vec::new();
    let mut facets = Vec::new();
    for f in 0..b.len() {
        if !b.alive[f] {
            continue;
        }
        verts.clear();
        verts.extend_from_slice(b.facet_verts(f));
        let area_scale = b.exact_normal(&verts)?;
        if dot(&b.normal, &b.normals[f * d..(f + 1) * d]) < 0.0 {
            for x in b.normal.iter_mut() {
                *x = -*x;
            }
        }
        let offset = dot(&b.normal, b.point(verts[0]));
        volume += area_scale * (offset - dot(&b.normal, &b.interior)) / scale;
        vertices.extend_from_slice(&verts);
        facets.push(RawFacet { verts: verts.clone(), normal: b.normal.clone(), offset });
    }
    vertices.sort_unstable();
    vertices.dedup();
    Ok(RawHull { vertices, facets, volume })
}
