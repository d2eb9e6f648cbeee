// SPDX-License-Identifier: Apache-2.0

//! Immutable binary adjacency of a directed graph.
//!
//! Targets are stored contiguously per source node (the columns of the
//! transition matrix). A second, by-target index is built once so that the
//! Google operator can be applied as a row gather.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoopPolicy {
    #[default]
    Keep,
    Drop,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Repeated `(source, target)` pairs count once.
    #[default]
    Collapse,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgePolicy {
    pub self_loops: SelfLoopPolicy,
    pub duplicates: DuplicatePolicy,
}

/// Counts gathered while building a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub dangling: usize,
    /// Self-loops present in the final graph.
    pub self_loops: usize,
    pub self_loops_dropped: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    num_nodes: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    inv_out_degree: Vec<f64>,
    dangling: Vec<u32>,
    labels: Option<Vec<String>>,
}

impl DirectedGraph {
    /// Builds a graph over nodes `0..num_nodes` from `(source, target)` pairs.
    pub fn from_edges<I>(num_nodes: usize, edges: I, policy: EdgePolicy) -> Result<(Self, ValidationReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if num_nodes == 0 {
            return Err(Error::EmptyGraph);
        }
        if num_nodes > u32::MAX as usize {
            return Err(Error::TooManyNodes(num_nodes));
        }
        let mut report = ValidationReport { num_nodes, ..Default::default() };
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (s, t) in edges {
            for id in [s, t] {
                if id >= num_nodes {
                    return Err(Error::NodeOutOfRange { id, num_nodes });
                }
            }
            if s == t {
                match policy.self_loops {
                    SelfLoopPolicy::Keep => {}
                    SelfLoopPolicy::Drop => {
                        report.self_loops_dropped += 1;
                        continue;
                    }
                    SelfLoopPolicy::Reject => return Err(Error::SelfLoop(s)),
                }
            }
            pairs.push((s as u32, t as u32));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        if policy.duplicates == DuplicatePolicy::Reject {
            if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge { source_node: w[0].0 as usize, target: w[0].1 as usize });
            }
        }
        pairs.dedup();
        report.duplicates_removed = before - pairs.len();

        let graph = Self::from_sorted_pairs(num_nodes, &pairs);
        report.num_edges = graph.num_edges();
        report.dangling = graph.dangling.len();
        report.self_loops = pairs.iter().filter(|(s, t)| s == t).count();
        Ok((graph, report))
    }

    fn from_sorted_pairs(num_nodes: usize, pairs: &[(u32, u32)]) -> Self {
        let mut out_offsets = vec![0usize; num_nodes + 1];
        let mut in_offsets = vec![0usize; num_nodes + 1];
        for &(s, t) in pairs {
            out_offsets[s as usize + 1] += 1;
            in_offsets[t as usize + 1] += 1;
        }
        for k in 0..num_nodes {
            out_offsets[k + 1] += out_offsets[k];
            in_offsets[k + 1] += in_offsets[k];
        }
        let out_targets: Vec<u32> = pairs.iter().map(|&(_, t)| t).collect();
        // Pairs are sorted by source, so each by-target list comes out ascending.
        let mut in_sources = vec![0u32; pairs.len()];
        let mut cursor = in_offsets.clone();
        for &(s, t) in pairs {
            in_sources[cursor[t as usize]] = s;
            cursor[t as usize] += 1;
        }
        let mut inv_out_degree = vec![0.0; num_nodes];
        let mut dangling = Vec::new();
        for j in 0..num_nodes {
            let k = out_offsets[j + 1] - out_offsets[j];
            if k == 0 {
                dangling.push(j as u32);
            } else {
                inv_out_degree[j] = 1.0 / k as f64;
            }
        }
        Self { num_nodes, out_offsets, out_targets, in_offsets, in_sources, inv_out_degree, dangling, labels: None }
    }

    /// Attaches one display label per node.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_nodes {
            return Err(Error::LabelCount { labels: labels.len(), num_nodes: self.num_nodes });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_offsets[node + 1] - self.out_offsets[node]
    }

    /// Sorted distinct targets of `node`.
    pub fn targets(&self, node: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    /// Sorted distinct sources pointing at `node`.
    pub fn sources(&self, node: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    /// `1 / k_out(node)`, or zero for a dangling node.
    pub fn inv_out_degree(&self) -> &[f64] {
        &self.inv_out_degree
    }

    pub fn dangling_nodes(&self) -> &[u32] {
        &self.dangling
    }

    pub fn is_dangling(&self, node: usize) -> bool {
        self.out_degree(node) == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[node].as_str())
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.targets(source).binary_search(&(target as u32)).is_ok()
    }

    /// All edges as `(source, target)`, ordered by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |j| self.targets(j).iter().map(move |&i| (j, i as usize)))
    }

    /// Recomputes the validation counts from the stored adjacency.
    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            num_nodes: self.num_nodes,
            num_edges: self.num_edges(),
            dangling: self.dangling.len(),
            self_loops: (0..self.num_nodes).filter(|&j| self.has_edge(j, j)).count(),
            self_loops_dropped: 0,
            duplicates_removed: 0,
        }
    }
}
