// SPDX-License-Identifier: Apache-2.0

//! The Google matrix `G = alpha S + (1 - alpha) / N` as an implicit operator.
//!
//! `S` is the column-stochastic link matrix: column `j` spreads `1 / k_out(j)`
//! over the targets of `j`, or `1 / N` over every node when `j` is dangling.
//! Dangling columns and teleportation collapse into two scalars per
//! application, the dangling mass and the total mass of the input.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::par;
use crate::subset::SubsetSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoogleParams {
    /// Damping factor, in `(0, 1)`.
    pub alpha: f64,
    /// L1 change at which power iteration stops.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for GoogleParams {
    fn default() -> Self {
        Self { alpha: 0.85, tol: 1e-12, max_iters: 10_000 }
    }
}

impl GoogleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter { name: "alpha", reason: alloc::format!("{} not in (0, 1)", self.alpha) });
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter { name: "tol", reason: alloc::format!("{} must be positive", self.tol) });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter { name: "max_iters", reason: "must be at least 1".into() });
        }
        Ok(())
    }
}

/// Borrowing view of `G` over a graph.
#[derive(Debug, Clone, Copy)]
pub struct GoogleOperator<'g> {
    graph: &'g DirectedGraph,
    alpha: f64,
}

impl<'g> GoogleOperator<'g> {
    pub fn new(graph: &'g DirectedGraph, alpha: f64) -> Self {
        Self { graph, alpha }
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn uniform_shift(&self, dangling_mass: f64, total_mass: f64) -> f64 {
        (self.alpha * dangling_mass + (1.0 - self.alpha) * total_mass) / self.graph.num_nodes() as f64
    }

    /// `out = G v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let g = self.graph;
        let n = g.num_nodes();
        assert!(v.len() == n && out.len() == n, "vector length");
        let inv = g.inv_out_degree();
        let total = par::sum_by(n, |j| v[j]);
        let dangling: f64 = g.dangling_nodes().iter().map(|&j| v[j as usize]).sum();
        let shift = self.uniform_shift(dangling, total);
        let alpha = self.alpha;
        par::for_each_row(out, 1, |i, o| {
            let acc: f64 = g.sources(i).iter().map(|&j| v[j as usize] * inv[j as usize]).sum();
            o[0] = alpha * acc + shift;
        });
    }

    /// `out = G X` for a row-major block `X` of `width` columns over all nodes.
    pub fn apply_block(&self, x: &[f64], width: usize, out: &mut [f64]) {
        let g = self.graph;
        let n = g.num_nodes();
        assert!(x.len() == n * width && out.len() == n * width, "block shape");
        let inv = g.inv_out_degree();
        let total = par::column_sums(x, width, |_| true);
        let mut shift = vec![0.0; width];
        for &j in g.dangling_nodes() {
            let row = &x[j as usize * width..(j as usize + 1) * width];
            for (s, v) in shift.iter_mut().zip(row) {
                *s += v;
            }
        }
        for (s, t) in shift.iter_mut().zip(&total) {
            *s = self.uniform_shift(*s, *t);
        }
        let alpha = self.alpha;
        par::for_each_row(out, width, |i, o| {
            o.iter_mut().for_each(|e| *e = 0.0);
            for &j in g.sources(i) {
                let j = j as usize;
                let w = inv[j];
                let row = &x[j * width..(j + 1) * width];
                for (e, v) in o.iter_mut().zip(row) {
                    *e += v * w;
                }
            }
            for (e, s) in o.iter_mut().zip(&shift) {
                *e = alpha * *e + s;
            }
        });
    }

    /// `out = G^T u`.
    pub fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        let g = self.graph;
        let n = g.num_nodes();
        assert!(u.len() == n && out.len() == n, "vector length");
        let total = par::sum_by(n, |i| u[i]);
        let nf = n as f64;
        let teleport = (1.0 - self.alpha) * total / nf;
        let dangling_col = self.alpha * total / nf + teleport;
        let alpha = self.alpha;
        let inv = g.inv_out_degree();
        par::for_each_row(out, 1, |j, o| {
            let targets = g.targets(j);
            o[0] = if targets.is_empty() {
                dangling_col
            } else {
                let acc: f64 = targets.iter().map(|&i| u[i as usize]).sum();
                alpha * inv[j] * acc + teleport
            };
        });
    }

    /// Column `j` of `G`, densely.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let n = self.graph.num_nodes();
        let nf = n as f64;
        let targets = self.graph.targets(j);
        if targets.is_empty() {
            return vec![1.0 / nf; n];
        }
        let mut col = vec![(1.0 - self.alpha) / nf; n];
        let w = self.alpha / targets.len() as f64;
        for &i in targets {
            col[i as usize] += w;
        }
        col
    }
}

/// `G v` for a graph and damping factor.
pub fn apply_g(graph: &DirectedGraph, params: &GoogleParams, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != graph.num_nodes() {
        return Err(Error::LengthMismatch { expected: graph.num_nodes(), got: v.len() });
    }
    let mut out = vec![0.0; v.len()];
    GoogleOperator::new(graph, params.alpha).apply(v, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    /// Probability per node, summing to one.
    pub p: Vec<f64>,
    /// Node ids by descending probability; `rank[0]` has PageRank index 1.
    pub rank: Vec<usize>,
    pub iterations: usize,
    /// L1 change of the final iteration.
    pub residual: f64,
}

impl PageRankResult {
    /// One-based PageRank index per node.
    pub fn rank_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.p.len()];
        for (pos, &node) in self.rank.iter().enumerate() {
            idx[node] = pos + 1;
        }
        idx
    }
}

/// Indices of `values` sorted by descending value, ties by ascending `key`.
pub(crate) fn descending_order(values: &[f64], key: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then_with(|| key(a).cmp(&key(b))));
    order
}

/// Power iteration from the uniform vector.
pub fn pagerank(graph: &DirectedGraph, params: &GoogleParams) -> Result<PageRankResult> {
    params.validate()?;
    let n = graph.num_nodes();
    let op = GoogleOperator::new(graph, params.alpha);
    let mut p = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=params.max_iters {
        op.apply(&p, &mut next);
        let total = par::sum_by(n, |i| next[i]);
        par::for_each_row(&mut next, 1, |_, x| x[0] /= total);
        residual = par::sum_by(n, |i| (next[i] - p[i]).abs());
        core::mem::swap(&mut p, &mut next);
        if residual < params.tol {
            let rank = descending_order(&p, |i| i);
            return Ok(PageRankResult { p, rank, iterations: it, residual });
        }
    }
    Err(Error::NotConverged { what: "PageRank", iterations: params.max_iters, residual })
}

/// A subset member placed in the local ranking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRank {
    pub member: usize,
    pub node: usize,
    /// One-based position inside the subset.
    pub local_index: usize,
    pub probability: f64,
}

/// Subset members ordered by descending global probability, ties by node id.
pub fn local_rank(pr: &PageRankResult, subset: &SubsetSpec) -> Vec<LocalRank> {
    let nodes = subset.nodes();
    let values: Vec<f64> = nodes.iter().map(|&n| pr.p[n]).collect();
    rank_members(&values, &nodes)
}

pub(crate) fn rank_members(values: &[f64], nodes: &[usize]) -> Vec<LocalRank> {
    descending_order(values, |m| nodes[m])
        .into_iter()
        .enumerate()
        .map(|(pos, m)| LocalRank { member: m, node: nodes[m], local_index: pos + 1, probability: values[m] })
        .collect()
}
