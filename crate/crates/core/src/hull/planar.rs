//! Andrew's monotone chain for planar hulls.

/// Counter-clockwise hull vertices of the 2D candidates. Points within `tol`
/// of a hull edge (collinear boundary points) are dropped. Candidates with
/// identical coordinates keep only the lowest index.
pub(crate) fn monotone_chain(coords: &[f64], candidates: &[usize], tol: f64) -> Vec<usize> {
    let p = |i: usize| (coords[2 * i], coords[2 * i + 1]);
    let mut order: Vec<usize> = candidates.to_vec();
    order.sort_by(|&a, &b| {
        let (ax, ay) = p(a);
        let (bx, by) = p(b);
        ax.total_cmp(&bx).then(ay.total_cmp(&by)).then(a.cmp(&b))
    });
    order.dedup_by(|b, a| p(*a) == p(*b));
    if order.len() <= 2 {
        return order;
    }

    // a is dropped when it is not strictly left of o -> b by more than tol
    let keep_left = |o: usize, a: usize, b: usize| {
        let (ox, oy) = p(o);
        let (ax, ay) = p(a);
        let (bx, by) = p(b);
        let cross = (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
        let base = ((bx - ox).powi(2) + (by - oy).powi(2)).sqrt();
        cross > tol * base
    };

    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for &i in &order {
        while hull.len() >= 2 && !keep_left(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower_len && !keep_left(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_centre_and_edge_midpoint() {
        let coords = [0.0, 0.0, 1.0, 0.0, 0.5, 0.5, 1.0, 1.0, 0.0, 1.0, 0.5, 0.0];
        let hull = monotone_chain(&coords, &[0, 1, 2, 3, 4, 5], 1e-9);
        assert_eq!(hull, vec![0, 1, 3, 4]);
    }

    #[test]
    fn collinear_gives_endpoints() {
        let coords = [0.0, 0.0, 2.0, 2.0, 1.0, 1.0, 3.0, 3.0];
        let hull = monotone_chain(&coords, &[0, 1, 2, 3], 1e-9);
        assert_eq!(hull, vec![0, 3]);
    }

    #[test]
    fn duplicates_keep_first_index() {
        let coords = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let hull = monotone_chain(&coords, &[0, 1, 2, 3], 1e-9);
        assert_eq!(hull, vec![0, 1, 2]);
    }
}
