// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgm_core::reduced::compute_reduced;
use rgm_core::sensitivity::{influence_map, perturb_and_normalize, sensitivity};
use rgm_core::{GoogleParams, Perturbation, ReducedParams, ReducedSet, SubsetSpec};

/// Rebuilds the perturbed matrix entry by entry and solves both stationary
/// systems directly.
fn from_scratch(rs: &ReducedSet, j: usize, i: usize, delta: f64) -> Vec<f64> {
    let n = rs.nr();
    let base = DMatrix::from_fn(n, n, |r, c| rs.gr[(r, c)]);
    let mut pert = base.clone();
    pert[(i, j)] *= 1.0 + delta;
    let s: f64 = pert.column(j).sum();
    for r in 0..n {
        pert[(r, j)] /= s;
    }
    let p = nalgebra_stationary(&base);
    let q = nalgebra_stationary(&pert);
    (0..n).map(|k| (q[k] - p[k]) / (delta * p[k])).collect()
}

fn fixture_set() -> ReducedSet {
    let g = fixture();
    let subset = SubsetSpec::from_nodes(5, &[0, 2, 4], "x").unwrap();
    compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap()
}

#[test]
fn fixture_derivative_matches_direct_solve() {
    let rs = fixture_set();
    let rep = sensitivity(&rs, &Perturbation::new(0, 1, 0.03).unwrap()).unwrap();
    let expect = from_scratch(&rs, 0, 1, 0.03);
    for (a, b) in rep.d.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    assert!((rep.p_prime.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // Boosting 0 -> 1 raises member 1.
    assert!(rep.d[1] > 0.0);
}

#[test]
fn derivative_is_smooth_in_delta() {
    let rs = fixture_set();
    let small = sensitivity(&rs, &Perturbation::new(0, 1, 1e-3).unwrap()).unwrap();
    let large = sensitivity(&rs, &Perturbation::new(0, 1, 3e-3).unwrap()).unwrap();
    let scale = small.d.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for (a, b) in small.d.iter().zip(&large.d) {
        assert!((a - b).abs() <= 0.01 * scale);
    }
}

#[test]
fn slope_stable_over_delta_range() {
    let g = scale_free(400, 3, 21);
    let subset = random_subset(400, 15, 21);
    let rs = compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap();
    let (j, i) = (0..15)
        .flat_map(|j| (0..15).map(move |i| (j, i)))
        .find(|&(j, i)| i != j && rs.gr[(i, j)] > 0.05)
        .unwrap();
    let at = |delta| sensitivity(&rs, &Perturbation::new(j, i, delta).unwrap()).unwrap().d;
    let (d1, d2, d3) = (at(1e-3), at(3e-3), at(3e-2));
    let scale = d1.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for k in 0..15 {
        // First-order in delta: the gap grows roughly linearly.
        assert!((d1[k] - d2[k]).abs() <= 0.01 * scale);
        assert!((d1[k] - d3[k]).abs() <= 0.1 * scale);
    }
}

#[test]
fn null_perturbations_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // Sparse direct links plus a reduced set dense enough to have some zeros
    // only after we carve them out.
    let g = random_graph(300, 3.0, 0.0, 4);
    let subset = random_subset(300, 10, 4);
    let mut rs = compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap();
    for _ in 0..20 {
        let (i, j) = (rng.gen_range(0..10), rng.gen_range(0..10));
        let old = rs.gr[(i, j)];
        rs.gr[(i, j)] = 0.0;
        let rep = sensitivity(&rs, &Perturbation::new(j, i, 0.03).unwrap()).unwrap();
        assert!(rep.d.iter().all(|&v| v == 0.0));
        assert_eq!(perturb_and_normalize(&rs, &Perturbation::new(j, i, 0.5).unwrap()).unwrap(), rs.gr);
        rs.gr[(i, j)] = old;
    }
}

#[test]
fn mass_conservation_and_stochasticity() {
    let g = random_graph(500, 4.0, 0.1, 8);
    let subset = random_subset(500, 30, 8);
    let rs = compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..25 {
        let pert = Perturbation::new(rng.gen_range(0..30), rng.gen_range(0..30), 0.03).unwrap();
        let m = perturb_and_normalize(&rs, &pert).unwrap();
        assert!(m.column_sums().iter().all(|s| (s - 1.0).abs() < 1e-12));
        let rep = sensitivity(&rs, &pert).unwrap();
        let mass: f64 = rep.d.iter().zip(&rs.pr_reduced).map(|(d, p)| d * p).sum();
        assert!(mass.abs() < 1e-10);
    }
}

#[test]
fn groups_without_links_give_zero_columns() {
    let mut rs = fixture_set();
    // Member 2 as the only group; cut the links from both countries to it.
    rs.gr[(2, 0)] = 0.0;
    rs.gr[(2, 1)] = 0.0;
    let t = influence_map(&rs, &[2], &[0, 1], 0.03).unwrap();
    assert_eq!(t.values, vec![0.0, 0.0]);
}
