mod common;

use common::{brute_hull, leave_one_out_vertices, random_cloud};
use convex_volume::{classify_points, convex_hull, convex_hull_with, HullAlgorithm, PointCloud, PointLabel};

fn cloud(points: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_rows(points[0].len(), points).unwrap()
}

#[test]
fn matches_brute_force_on_small_clouds() {
    for seed in 0..300u64 {
        let d = 2 + (seed % 3) as usize;
        let n = d + 1 + (seed as usize * 7) % (12 - d);
        let points = random_cloud(seed, n, d);
        let hull = convex_hull(&cloud(&points)).unwrap();
        let brute = brute_hull(&points);
        let mut ours = hull.vertex_indices.clone();
        ours.sort_unstable();
        assert_eq!(ours, brute.vertices, "seed {seed}, d={d}, n={n}");
        assert!((hull.hull_volume - brute.volume).abs() <= 1e-10 * brute.volume, "seed {seed}");
    }
}

#[test]
fn brute_force_oracles_agree() {
    for seed in 0..40u64 {
        let d = 2 + (seed % 3) as usize;
        let points = random_cloud(1000 + seed, 10, d);
        assert_eq!(brute_hull(&points).vertices, leave_one_out_vertices(&points), "seed {seed}");
    }
}

#[test]
fn quickhull_agrees_with_monotone_chain() {
    for seed in 0..1000u64 {
        let n = 3 + (seed as usize % 200);
        let points = random_cloud(50_000 + seed, n, 2);
        let c = cloud(&points);
        let planar = convex_hull_with(&c, HullAlgorithm::Auto).unwrap();
        let general = convex_hull_with(&c, HullAlgorithm::Quickhull).unwrap();
        let mut a = planar.vertex_indices.clone();
        a.sort_unstable();
        assert_eq!(a, general.vertex_indices, "seed {seed}");
        assert!((planar.hull_volume - general.hull_volume).abs() <= 1e-12 * planar.hull_volume.max(1.0));
    }
}

#[test]
fn labels_partition_the_cloud() {
    let points = random_cloud(7, 500, 3);
    let c = cloud(&points);
    let hull = convex_hull(&c).unwrap();
    let labels = classify_points(&c, &hull).unwrap();
    let boundary = labels.iter().filter(|l| **l == PointLabel::Boundary).count();
    assert_eq!(boundary, hull.n_boundary);
    assert_eq!(labels.len() - boundary, hull.n_interior);
    assert_eq!(hull.n_boundary + hull.n_interior, hull.n_total);
    for (i, l) in labels.iter().enumerate() {
        assert_eq!(*l == PointLabel::Boundary, hull.vertex_indices.contains(&i));
    }
}

#[test]
fn every_point_is_inside_its_hull() {
    for d in 2..=5 {
        let points = random_cloud(d as u64, 300, d);
        let hull = convex_hull(&cloud(&points)).unwrap();
        for p in &points {
            assert!(hull.contains(p));
        }
        for f in &hull.facets {
            let n: f64 = f.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn cube_with_many_coplanar_points() {
    // lattice points on a cube surface: heavily degenerate facets
    let mut points = Vec::new();
    for i in 0..=4 {
        for j in 0..=4 {
            for k in 0..=4 {
                points.push(vec![i as f64 / 4.0, j as f64 / 4.0, k as f64 / 4.0]);
            }
        }
    }
    let hull = convex_hull(&cloud(&points)).unwrap();
    assert_eq!(hull.n_boundary, 8);
    assert_eq!(hull.n_interior, 125 - 8);
    assert!((hull.hull_volume - 1.0).abs() < 1e-12);
}

#[test]
fn hull_json_lists_counts() {
    let points = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.2, 0.2]];
    let hull = convex_hull(&cloud(&points)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&hull.to_json().unwrap()).unwrap();
    assert_eq!(v["n_boundary"], 3);
    assert_eq!(v["n_interior"], 1);
    assert_eq!(v["facets"].as_array().unwrap().len(), 3);
    assert!((v["hull_volume"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}
