use convex_volume::geometry::{AxisBox, ConvexBody, Ellipsoid, Polytope};
use convex_volume::ppp::{sample_poisson, sample_ppp_with, sample_uniform};
use convex_volume::rng::RngStream;

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Upper `alpha = 1e-3` quantile of chi-square with `k` degrees of freedom (Wilson–Hilferty).
fn chi2_critical(k: usize) -> f64 {
    let z = 3.090_232;
    let k = k as f64;
    let c = 2.0 / (9.0 * k);
    k * (1.0 - c + z * c.sqrt()).powi(3)
}

fn poisson_pmf(mean: f64, k: usize) -> f64 {
    let ln: f64 = -mean + k as f64 * mean.ln() - (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
    ln.exp()
}

#[test]
fn poisson_moments() {
    for (mean, seed) in [(5.0, 1u64), (50.0, 2), (1e4, 3)] {
        let mut rng = RngStream::new(seed, 0);
        let draws: Vec<f64> = (0..1_000_000).map(|_| sample_poisson(mean, &mut rng).unwrap() as f64).collect();
        let (m, v) = moments(&draws);
        assert!((m - mean).abs() <= 0.01 * mean, "mean {m} for {mean}");
        assert!((v - mean).abs() <= 0.01 * mean, "variance {v} for {mean}");
    }
}

#[test]
fn poisson_pmf_goodness_of_fit() {
    for (mean, seed) in [(3.0, 4u64), (40.0, 5)] {
        let mut rng = RngStream::new(seed, 0);
        let m = 200_000;
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..m {
            *counts.entry(sample_poisson(mean, &mut rng).unwrap() as usize).or_insert(0usize) += 1;
        }
        let (stat, dof) = chi2(&counts, m, mean);
        assert!(stat < chi2_critical(dof), "mean {mean}: chi2 {stat} with {dof} dof");
    }
}

/// Pearson statistic over bins `0..=hi`, with both tails merged so every bin expects at least 5.
fn chi2(counts: &std::collections::BTreeMap<usize, usize>, m: usize, mean: f64) -> (f64, usize) {
    let m = m as f64;
    let lo = (0..).find(|&k| (0..=k).map(|j| poisson_pmf(mean, j)).sum::<f64>() * m >= 5.0).unwrap();
    let hi = (lo + 1..).find(|&k| poisson_pmf(mean, k) * m < 5.0).unwrap() - 1;
    let mut stat = 0.0;
    let mut bins = 0;
    let mut add = |observed: usize, p: f64| {
        let e = p * m;
        stat += (observed as f64 - e).powi(2) / e;
        bins += 1;
    };
    let obs = |r: std::ops::RangeInclusive<usize>| counts.range(r).map(|(_, c)| c).sum::<usize>();
    add(obs(0..=lo), (0..=lo).map(|j| poisson_pmf(mean, j)).sum());
    for k in lo + 1..=hi {
        add(obs(k..=k), poisson_pmf(mean, k));
    }
    let tail = 1.0 - (0..=hi).map(|j| poisson_pmf(mean, j)).sum::<f64>();
    add(obs(hi + 1..=usize::MAX), tail);
    (stat, bins - 1)
}

#[test]
fn box_coordinates_are_uniform() {
    let body = ConvexBody::Box(AxisBox::new(vec![-1.0, 2.0, 0.0], vec![3.0, 2.5, 10.0]).unwrap());
    let mut rng = RngStream::new(8, 0);
    let n = 20_000;
    let points: Vec<Vec<f64>> = (0..n).map(|_| sample_uniform(&body, &mut rng).unwrap()).collect();
    let (lo, hi) = ([-1.0, 2.0, 0.0], [3.0, 2.5, 10.0]);
    for k in 0..3 {
        let mut u: Vec<f64> = points.iter().map(|p| (p[k] - lo[k]) / (hi[k] - lo[k])).collect();
        u.sort_by(f64::total_cmp);
        let ks = u
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - x))
            .fold(0.0, f64::max);
        assert!(ks < 1.949 / (n as f64).sqrt(), "coordinate {k}: D = {ks}");
    }
}

#[test]
fn triangle_samples_have_the_centroid_as_mean() {
    let tri = ConvexBody::Polytope(Polytope::new(vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap());
    let mut rng = RngStream::new(9, 0);
    let n = 100_000;
    let pts: Vec<Vec<f64>> = (0..n).map(|_| sample_uniform(&tri, &mut rng).unwrap()).collect();
    for k in 0..2 {
        let (m, v) = moments(&pts.iter().map(|p| p[k]).collect::<Vec<_>>());
        assert!((m - 1.0).abs() < 4.0 * (v / n as f64).sqrt(), "axis {k}: {m}");
    }
}

#[test]
fn ellipsoid_shells_have_the_right_mass() {
    let e = Ellipsoid::new(vec![1.0, 2.0, 3.0], vec![vec![2.0, 0.3, 0.0], vec![0.0, 1.0, 0.5], vec![0.1, 0.0, 0.7]]).unwrap();
    let inner = Ellipsoid::new(
        vec![1.0, 2.0, 3.0],
        e.axes().iter().map(|row| row.iter().map(|x| 0.5 * x).collect()).collect(),
    )
    .unwrap();
    let body = ConvexBody::Ellipsoid(e);
    let mut rng = RngStream::new(10, 0);
    let n = 100_000;
    let hits = (0..n).filter(|_| inner.contains(&sample_uniform(&body, &mut rng).unwrap())).count();
    let p = 0.125;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
}

#[test]
fn counts_on_subregions_are_independent_poisson() {
    let body = ConvexBody::unit_cube(2).unwrap();
    let lambda = 50.0;
    let a = AxisBox::new(vec![0.0, 0.0], vec![0.5, 0.4]).unwrap();
    let b = AxisBox::new(vec![0.5, 0.4], vec![1.0, 1.0]).unwrap();
    let m = 20_000;
    let mut total = Vec::with_capacity(m);
    let mut in_a = Vec::with_capacity(m);
    let mut in_b = Vec::with_capacity(m);
    let mut hist = std::collections::BTreeMap::new();
    for r in 0..m {
        let cloud = sample_ppp_with(&body, lambda, &mut RngStream::new(11, r as u64)).unwrap();
        let na = cloud.iter().filter(|p| a.contains(p)).count();
        *hist.entry(na).or_insert(0usize) += 1;
        total.push(cloud.len() as f64);
        in_a.push(na as f64);
        in_b.push(cloud.iter().filter(|p| b.contains(p)).count() as f64);
    }
    let (mean, var) = moments(&total);
    let se = (var / m as f64).sqrt();
    assert!((mean - lambda).abs() < 4.0 * se, "E[N] = {mean}");
    // the variance of a sample variance of Poisson(μ) counts is about (2μ² + μ) / m
    let var_se = ((2.0 * lambda * lambda + lambda) / m as f64).sqrt();
    assert!((var - lambda).abs() < 4.0 * var_se, "Var[N] = {var}");

    let mean_a = lambda * a.volume();
    let (stat, dof) = chi2(&hist, m, mean_a);
    assert!(stat < chi2_critical(dof), "restricted counts: chi2 {stat} with {dof} dof");

    let (ma, va) = moments(&in_a);
    let (mb, vb) = moments(&in_b);
    let cov = in_a.iter().zip(&in_b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (m as f64 - 1.0);
    assert!(cov.abs() < 4.0 * (va * vb / m as f64).sqrt(), "cov = {cov}");
}
