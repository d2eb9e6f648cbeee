// SPDX-License-Identifier: Apache-2.0

//! Friend networks: iterated top-k selection over `Grr + Gqrnd`.
//!
//! The friends of member `j` are the members `i != j` holding the largest
//! entries of column `j`, i.e. the strongest outgoing direct plus hidden
//! links of `j`. Starting from seeds, every newly reached member is expanded
//! in turn until no new member joins.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::reduced::ReducedSet;
use crate::subset::SubsetSpec;

/// Which categories may be selected as friends.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum CandidateFilter {
    #[default]
    Any,
    Only(Vec<String>),
    Except(Vec<String>),
}

impl CandidateFilter {
    pub fn only(category: &str) -> Self {
        Self::Only(vec![category.into()])
    }

    pub fn except(category: &str) -> Self {
        Self::Except(vec![category.into()])
    }

    pub fn admits(&self, category: &str) -> bool {
        match self {
            Self::Any => true,
            Self::Only(c) => c.iter().any(|x| x == category),
            Self::Except(c) => !c.iter().any(|x| x == category),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendNode {
    pub member: usize,
    pub category: String,
    pub pagerank: f64,
    pub seed: bool,
    /// Generation in which the member joined; seeds are generation 0.
    pub generation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriendEdge {
    pub from: usize,
    pub to: usize,
    /// `(Grr + Gqrnd)(to, from)`.
    pub weight: f64,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendNetwork {
    /// In order of joining.
    pub nodes: Vec<FriendNode>,
    /// In order of selection.
    pub edges: Vec<FriendEdge>,
    /// Number of expansion rounds run.
    pub generations: usize,
}

impl FriendNetwork {
    pub fn contains(&self, member: usize) -> bool {
        self.nodes.iter().any(|n| n.member == member)
    }

    pub fn members(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.member).collect()
    }
}

/// One selection rule applied to every expanded member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quota {
    pub k: usize,
    pub filter: CandidateFilter,
}

struct Selector<'a> {
    weights: DenseMatrix,
    local_index: Vec<usize>,
    subset: &'a SubsetSpec,
    keep_zero: bool,
}

impl<'a> Selector<'a> {
    fn new(rs: &ReducedSet, subset: &'a SubsetSpec, keep_zero: bool) -> Result<Self> {
        if subset.len() != rs.nr() {
            return Err(Error::SubsetShape { field: "members", len: subset.len(), expected: rs.nr() });
        }
        Ok(Self { weights: rs.friend_weights(), local_index: rs.local_index(), subset, keep_zero })
    }

    fn top(&self, j: usize, k: usize, filter: &CandidateFilter) -> Vec<usize> {
        let col = self.weights.col(j);
        let mut cands: Vec<usize> = (0..col.len())
            .filter(|&i| i != j)
            .filter(|&i| if self.keep_zero { col[i] >= 0.0 } else { col[i] > 0.0 })
            .filter(|&i| filter.admits(&self.subset.entry(i).category))
            .collect();
        cands.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(self.local_index[a].cmp(&self.local_index[b])));
        cands.truncate(k);
        cands
    }
}

/// The `k` strongest friends of member `j` admitted by `filter`, strongest
/// first. Ties go to the member with the better local PageRank index.
/// Zero-weight candidates are never selected.
pub fn top_friends(
    rs: &ReducedSet,
    subset: &SubsetSpec,
    j: usize,
    k: usize,
    filter: &CandidateFilter,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", reason: "must be at least 1".into() });
    }
    subset.check_member(j)?;
    Ok(Selector::new(rs, subset, false)?.top(j, k, filter))
}

/// Closure under a list of selection quotas.
pub fn closure(
    rs: &ReducedSet,
    subset: &SubsetSpec,
    seeds: &[usize],
    quotas: &[Quota],
    keep_zero: bool,
) -> Result<FriendNetwork> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter { name: "seeds", reason: "at least one seed required".into() });
    }
    let sel = Selector::new(rs, subset, keep_zero)?;
    let mut joined: Vec<Option<usize>> = vec![None; rs.nr()];
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let push = |m: usize, seed: bool, generation: usize, nodes: &mut Vec<FriendNode>| {
        nodes.push(FriendNode {
            member: m,
            category: subset.entry(m).category.clone(),
            pagerank: rs.pr_reduced[m],
            seed,
            generation,
        });
    };
    let mut frontier = Vec::new();
    for &s in seeds {
        subset.check_member(s)?;
        if joined[s].is_none() {
            joined[s] = Some(0);
            push(s, true, 0, &mut nodes);
            frontier.push(s);
        }
    }
    let mut generation = 0;
    while !frontier.is_empty() {
        generation += 1;
        let mut next = Vec::new();
        for &j in &frontier {
            for q in quotas {
                for i in sel.top(j, q.k, &q.filter) {
                    edges.push(FriendEdge { from: j, to: i, weight: sel.weights[(i, j)], generation });
                    if joined[i].is_none() {
                        joined[i] = Some(generation);
                        push(i, false, generation, &mut nodes);
                        next.push(i);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(FriendNetwork { nodes, edges, generations: generation })
}

/// Top-`k` friend closure from `seeds`.
pub fn friend_closure(
    rs: &ReducedSet,
    subset: &SubsetSpec,
    seeds: &[usize],
    k: usize,
    filter: &CandidateFilter,
) -> Result<FriendNetwork> {
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", reason: "must be at least 1".into() });
    }
    closure(rs, subset, seeds, &[Quota { k, filter: filter.clone() }], false)
}

/// Closure where every expanded member picks `k_groups` friends outside
/// `country_category` and `k_countries` inside it.
pub fn bipartite_closure(
    rs: &ReducedSet,
    subset: &SubsetSpec,
    seeds: &[usize],
    k_groups: usize,
    k_countries: usize,
    country_category: &str,
) -> Result<FriendNetwork> {
    let quotas = [
        Quota { k: k_groups, filter: CandidateFilter::except(country_category) },
        Quota { k: k_countries, filter: CandidateFilter::only(country_category) },
    ];
    closure(rs, subset, seeds, &quotas, false)
}

/// The best-ranked member of each category, in order of first appearance.
pub fn category_leaders(rs: &ReducedSet, subset: &SubsetSpec) -> Vec<usize> {
    let ranking = rs.local_ranking();
    subset
        .categories()
        .into_iter()
        .filter_map(|c| ranking.iter().find(|l| subset.entry(l.member).category == c).map(|l| l.member))
        .collect()
}
