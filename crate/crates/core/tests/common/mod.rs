// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgm_core::graph::{DirectedGraph, EdgePolicy};
use rgm_core::SubsetSpec;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
    DirectedGraph::from_edges(n, edges.iter().copied(), EdgePolicy::default()).unwrap().0
}

/// The 5-node fixture: a 3-cycle 0 -> 1 -> 2 -> 0 joined to a second cycle
/// 2 -> 3 -> 4 -> 2.
pub fn fixture() -> DirectedGraph {
    graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
}

/// Directed Erdos-Renyi style graph with mean out-degree `deg`; roughly
/// `dangling_frac` of nodes get no out-links.
pub fn random_graph(n: usize, deg: f64, dangling_frac: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = deg / n as f64;
    let mut edges = Vec::new();
    for j in 0..n {
        if rng.gen::<f64>() < dangling_frac {
            continue;
        }
        for i in 0..n {
            if i != j && rng.gen::<f64>() < p {
                edges.push((j, i));
            }
        }
    }
    graph(n, &edges)
}

/// Preferential-attachment graph: each new node links to `m` earlier nodes
/// picked proportionally to in-degree + 1, and some earlier nodes link back.
pub fn scale_free(n: usize, m: usize, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = vec![0];
    let mut edges = Vec::new();
    for v in 1..n {
        for _ in 0..m.min(v) {
            let t = pool[rng.gen_range(0..pool.len())];
            edges.push((v, t));
            pool.push(t);
            if rng.gen::<f64>() < 0.3 {
                edges.push((t, v));
            }
        }
        pool.push(v);
    }
    graph(n, &edges)
}

pub fn random_subset(n: usize, nr: usize, seed: u64) -> SubsetSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    SubsetSpec::from_nodes(n, &ids[..nr], "x").unwrap()
}

/// Dense Google matrix assembled straight from the edge lists.
pub fn dense_google(g: &DirectedGraph, alpha: f64) -> DMatrix<f64> {
    let n = g.num_nodes();
    let mut m = DMatrix::from_element(n, n, (1.0 - alpha) / n as f64);
    for j in 0..n {
        let t = g.targets(j);
        if t.is_empty() {
            for i in 0..n {
                m[(i, j)] += alpha / n as f64;
            }
        } else {
            for &i in t {
                m[(i as usize, j)] += alpha / t.len() as f64;
            }
        }
    }
    m
}

/// `G_rr + G_rs (1 - G_ss)^-1 G_sr` through nalgebra's LU.
pub fn nalgebra_reduced(g: &DirectedGraph, alpha: f64, members: &[usize]) -> DMatrix<f64> {
    let full = dense_google(g, alpha);
    let n = g.num_nodes();
    let scat: Vec<usize> = (0..n).filter(|v| !members.contains(v)).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| full[(rows[i], cols[j])]);
    let grr = pick(members, members);
    if scat.is_empty() {
        return grr;
    }
    let grs = pick(members, &scat);
    let gsr = pick(&scat, members);
    let gss = pick(&scat, &scat);
    let a = DMatrix::identity(scat.len(), scat.len()) - gss;
    let x = a.lu().solve(&gsr).expect("nonsingular");
    grr + grs * x
}

/// Stationary vector of a column-stochastic matrix through nalgebra.
pub fn nalgebra_stationary(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("nonsingular").iter().copied().collect()
}
