//! Affine rank detection by greedy Gram-Schmidt over the candidate points.

use crate::linalg::dot;

pub(crate) struct AffineFrame {
    /// Chosen points, `rank + 1` of them, spanning the affine hull.
    pub simplex: Vec<usize>,
    /// Orthonormal basis of the affine hull's direction space, `rank` vectors.
    pub basis: Vec<Vec<f64>>,
}

impl AffineFrame {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn origin<'a>(&self, coords: &'a [f64], dim: usize) -> &'a [f64] {
        let o = self.simplex[0];
        &coords[o * dim..(o + 1) * dim]
    }

    /// Coordinates of every candidate in the frame's basis, flat with stride `rank`.
    pub fn project(&self, coords: &[f64], dim: usize, candidates: &[usize]) -> Vec<f64> {
        let origin = self.origin(coords, dim);
        let rank = self.rank();
        let mut out = Vec::with_capacity(candidates.len() * rank);
        let mut diff = vec![0.0; dim];
        for &i in candidates {
            let p = &coords[i * dim..(i + 1) * dim];
            for k in 0..dim {
                diff[k] = p[k] - origin[k];
            }
            out.extend(self.basis.iter().map(|b| dot(b, &diff)));
        }
        out
    }
}

/// Greedily picks up to `dim + 1` points that are as far as possible from the
/// affine hull of the ones already picked. Stops when every remaining residual
/// is within `tol`.
pub(crate) fn affine_frame(coords: &[f64], dim: usize, candidates: &[usize], tol: f64) -> AffineFrame {
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let first = *candidates
        .iter()
        .min_by(|&&a, &&b| point(a)[0].total_cmp(&point(b)[0]).then(a.cmp(&b)))
        .expect("affine_frame needs at least one candidate");
    let origin = point(first);
    let mut simplex = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut residual = vec![0.0; dim];

    while basis.len() < dim {
        let mut best = (0.0, usize::MAX);
        let mut best_vec = vec![0.0; dim];
        for &i in candidates {
            let p = point(i);
            for k in 0..dim {
                residual[k] = p[k] - origin[k];
            }
            for b in &basis {
                let c = dot(b, &residual);
                for k in 0..dim {
                    residual[k] -= c * b[k];
                }
            }
            let r = dot(&residual, &residual).sqrt();
            if r > best.0 {
                best = (r, i);
                best_vec.copy_from_slice(&residual);
            }
        }
        if best.0 <= tol {
            break;
        }
        for v in best_vec.iter_mut() {
            *v /= best.0;
        }
        // one re-orthogonalisation pass keeps the basis clean for nearly parallel picks
        for b in &basis {
            let c = dot(b, &best_vec);
            for k in 0..dim {
                best_vec[k] -= c * b[k];
            }
        }
        let n = dot(&best_vec, &best_vec).sqrt();
        for v in best_vec.iter_mut() {
            *v /= n;
        }
        basis.push(best_vec);
        simplex.push(best.1);
    }
    AffineFrame { simplex, basis }
}
