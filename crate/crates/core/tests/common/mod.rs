//! Brute-force hull oracle for small clouds in general position.
//!
//! A `d`-subset spans a facet when every other point lies on one side of its
//! hyperplane; the volume is the sum of cones from the mean point over those
//! facets. Nothing here shares code with the library's hull routines.

#![allow(dead_code)]

pub fn det(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for r in c + 1..n {
            let f = a[r * n + c] / a[c * n + c];
            for k in c..n {
                a[r * n + k] -= f * a[c * n + k];
            }
        }
    }
    det
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Signed volume-like determinant of `[p_1 - p_0, …, p_{d-1} - p_0, q - p_0]`.
fn orient(points: &[Vec<f64>], facet: &[usize], q: &[f64]) -> f64 {
    let d = q.len();
    let base = &points[facet[0]];
    let mut m = Vec::with_capacity(d * d);
    for &i in &facet[1..] {
        m.extend(points[i].iter().zip(base).map(|(a, b)| a - b));
    }
    m.extend(q.iter().zip(base).map(|(a, b)| a - b));
    det(m, d)
}

pub struct BruteHull {
    pub vertices: Vec<usize>,
    pub volume: f64,
}

/// Exhaustive facet enumeration; assumes general position and `n > d`.
pub fn brute_hull(points: &[Vec<f64>]) -> BruteHull {
    let n = points.len();
    let d = points[0].len();
    if n <= d {
        return BruteHull { vertices: (0..n).collect(), volume: 0.0 };
    }
    let scale = points.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let eps = 1e-12 * scale.powi(d as i32);
    let centre: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
    let d_fact: f64 = (1..=d).map(|k| k as f64).product();
    let mut is_vertex = vec![false; n];
    let mut volume = 0.0;
    for facet in subsets(n, d) {
        let (mut pos, mut neg) = (false, false);
        for (q, p) in points.iter().enumerate() {
            if facet.contains(&q) {
                continue;
            }
            let s = orient(points, &facet, p);
            pos |= s > eps;
            neg |= s < -eps;
        }
        if pos && neg {
            continue;
        }
        for &i in &facet {
            is_vertex[i] = true;
        }
        let mut m = Vec::with_capacity(d * d);
        for &i in &facet {
            m.extend(points[i].iter().zip(&centre).map(|(a, b)| a - b));
        }
        volume += det(m, d).abs() / d_fact;
    }
    BruteHull { vertices: (0..n).filter(|&i| is_vertex[i]).collect(), volume }
}

/// Points whose removal shrinks the brute-force volume.
pub fn leave_one_out_vertices(points: &[Vec<f64>]) -> Vec<usize> {
    let full = brute_hull(points).volume;
    (0..points.len())
        .filter(|&i| {
            let rest: Vec<Vec<f64>> =
                points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            full - brute_hull(&rest).volume > 1e-10 * full
        })
        .collect()
}

/// Deterministic cloud in general position.
pub fn random_cloud(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect()
}
