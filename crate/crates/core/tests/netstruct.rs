// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rgm_core::netstruct::{bipartite_closure, friend_closure, CandidateFilter};
use rgm_core::reduced::compute_reduced;
use rgm_core::subset::SubsetEntry;
use rgm_core::{GoogleParams, ReducedParams, SubsetSpec};

#[test]
fn fixture_chain_of_argmaxes() {
    let g = fixture();
    let members = [0, 2, 4];
    let subset = SubsetSpec::from_nodes(5, &members, "x").unwrap();
    let rs = compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap();

    // Trace by hand on the dense route: GR = Grr + Gpr + Gqr, with Gpr's
    // share removed through the oracle split.
    let gr = nalgebra_reduced(&g, 0.85, &members);
    let rs_oracle = rgm_core::reduced::dense_oracle_reduced(&g, &GoogleParams::default(), &subset).unwrap();
    let w = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { gr[(i, j)] - rs_oracle.gpr[(i, j)] });
    let argmax = |j: usize| (0..3).filter(|&i| i != j).max_by(|&a, &b| w[(a, j)].total_cmp(&w[(b, j)])).unwrap();
    let mut expect_nodes = vec![0];
    let mut expect_edges = vec![];
    let mut cur = 0;
    loop {
        let nxt = argmax(cur);
        expect_edges.push((cur, nxt));
        if expect_nodes.contains(&nxt) {
            break;
        }
        expect_nodes.push(nxt);
        cur = nxt;
    }

    let net = friend_closure(&rs, &subset, &[0], 1, &CandidateFilter::Any).unwrap();
    assert_eq!(net.members(), expect_nodes);
    let edges: Vec<(usize, usize)> = net.edges.iter().map(|e| (e.from, e.to)).collect();
    assert_eq!(edges, expect_edges);
    assert!(net.generations <= 3);
}

fn categorized(n: usize, nr: usize, seed: u64) -> SubsetSpec {
    let base = random_subset(n, nr, seed);
    let entries = base
        .nodes()
        .into_iter()
        .enumerate()
        .map(|(m, v)| SubsetEntry::new(v, if m % 3 == 0 { "country" } else { "group" }, format!("n{v}")))
        .collect();
    SubsetSpec::new(n, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn closure_invariants(n in 40usize..300, nr in 3usize..30, k in 1usize..5, seed in 0u64..500) {
        let g = scale_free(n, 3, seed);
        let subset = categorized(n, nr, seed);
        let rs = compute_reduced(&g, &GoogleParams::default(), &subset, &ReducedParams::default()).unwrap();
        let seeds = [0, nr / 2];
        let net = friend_closure(&rs, &subset, &seeds, k, &CandidateFilter::Any).unwrap();
        prop_assert!(net.generations <= nr);
        // Closure: every endpoint is in the network and was expanded.
        for e in &net.edges {
            prop_assert!(net.contains(e.from) && net.contains(e.to));
            prop_assert!(e.weight > 0.0);
            prop_assert!(e.from != e.to);
        }
        let w = rs.friend_weights();
        let local = rs.local_index();
        for node in &net.nodes {
            let out: Vec<usize> = net.edges.iter().filter(|e| e.from == node.member).map(|e| e.to).collect();
            let mut cands: Vec<usize> = (0..nr).filter(|&i| i != node.member && w[(i, node.member)] > 0.0).collect();
            cands.sort_by(|&a, &b| w[(b, node.member)].total_cmp(&w[(a, node.member)]).then(local[a].cmp(&local[b])));
            cands.truncate(k);
            prop_assert_eq!(out, cands);
        }
        // Reachability: every non-seed joined through an edge of the
        // previous generation.
        for node in net.nodes.iter().filter(|n| !n.seed) {
            prop_assert!(net.edges.iter().any(|e| e.to == node.member && e.generation == node.generation));
        }
        let again = friend_closure(&rs, &subset, &seeds, k, &CandidateFilter::Any).unwrap();
        prop_assert_eq!(net, again);

        let bi = bipartite_closure(&rs, &subset, &seeds, 2, 2, "country").unwrap();
        for node in &bi.nodes {
            let out: Vec<&str> = bi.edges.iter().filter(|e| e.from == node.member).map(|e| subset.entry(e.to).category.as_str()).collect();
            prop_assert!(out.iter().filter(|&&c| c == "country").count() <= 2);
            prop_assert!(out.iter().filter(|&&c| c != "country").count() <= 2);
        }
    }
}
