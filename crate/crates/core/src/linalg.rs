//! Small dense kernels for the d ≤ 16 matrices that show up in hull and body code.

/// Determinant of an `n × n` row-major matrix, destroying `a`.
pub(crate) fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f != 0.0 {
                for k in col + 1..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    det
}

#[cfg(test)]
pub(crate) fn det(a: &[f64], n: usize) -> f64 {
    let mut work = a.to_vec();
    det_in_place(&mut work, n)
}

/// Inverse of an `n × n` row-major matrix by Gauss-Jordan elimination.
/// Returns `None` for a singular matrix.
pub(crate) fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))
            .unwrap();
        if m[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
        }
        let p = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col];
            if f != 0.0 {
                for k in 0..n {
                    m[row * n + k] -= f * m[col * n + k];
                    inv[row * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    Some(inv)
}

/// Unit normal of the hyperplane through the origin spanned by the `d - 1`
/// rows of `edges` (row-major, `(d-1) × d`), by Gaussian elimination with
/// complete pivoting. `edges` is destroyed.
///
/// Returns the norm of the generalised cross product of the rows, i.e. `(d-1)!`
/// times the `(d-1)`-volume of the simplex the edges span. Zero means the rows
/// are linearly dependent and `out` is left unspecified.
pub(crate) fn hyperplane_normal(edges: &mut [f64], d: usize, out: &mut [f64]) -> f64 {
    debug_assert_eq!(edges.len(), (d - 1) * d);
    // constant `d` lets the small loops unroll; this is the hull's hot path
    macro_rules! fixed {
        ($($n:literal)*) => {
            match d {
                $($n => normal_impl(edges, $n, out, &mut [0; $n], &mut [0.0; $n]),)*
                _ => normal_impl(edges, d, out, &mut vec![0; d], &mut vec![0.0; d]),
            }
        };
    }
    fixed!(2 3 4 5 6 7 8)
}

#[inline(always)]
fn normal_impl(edges: &mut [f64], d: usize, out: &mut [f64], cols: &mut [usize], w: &mut [f64]) -> f64 {
    let m = d - 1;
    let edges = &mut edges[..m * d];
    let out = &mut out[..d];
    // columns are swapped physically; cols[j] is the original index of column j
    for (j, c) in cols.iter_mut().enumerate() {
        *c = j;
    }
    let mut scale = 1.0;
    for k in 0..m {
        let (mut pr, mut pc, mut best) = (k, k, 0.0);
        for r in k..m {
            for c in k..d {
                let v = edges[r * d + c].abs();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pr != k {
            for c in 0..d {
                edges.swap(k * d + c, pr * d + c);
            }
        }
        if pc != k {
            for r in 0..m {
                edges.swap(r * d + k, r * d + pc);
            }
            cols.swap(k, pc);
        }
        let p = edges[k * d + k];
        scale *= p;
        for r in k + 1..m {
            let f = edges[r * d + k] / p;
            for c in k + 1..d {
                edges[r * d + c] -= f * edges[k * d + c];
            }
        }
    }
    // the last column is free; back-substitute U1 w = -u
    let mut norm2 = 1.0;
    for k in (0..m).rev() {
        let mut acc = -edges[k * d + m];
        for c in k + 1..m {
            acc -= edges[k * d + c] * w[c];
        }
        w[k] = acc / edges[k * d + k];
        norm2 += w[k] * w[k];
    }
    w[m] = 1.0;
    let s = norm2.sqrt();
    for j in 0..d {
        out[cols[j]] = w[j] / s;
    }
    scale.abs() * s
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `d!` as a float.
pub(crate) fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}
