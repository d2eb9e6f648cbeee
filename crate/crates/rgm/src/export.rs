// SPDX-License-Identifier: Apache-2.0

//! Output formats: CSV tables, JSON sidecars, GEXF and DOT networks.
//!
//! Floats are written in shortest round-trip form, so identical inputs give
//! byte-identical files and values reload exactly.

use std::fmt::Write as _;

use rgm_core::google::{LocalRank, PageRankResult};
use rgm_core::netstruct::FriendNetwork;
use rgm_core::sensitivity::{SensitivityReport, SensitivityTable};
use rgm_core::{DenseMatrix, ReducedSet, SubsetSpec};
use serde::Serialize;

use crate::error::Result;
use crate::io::Catalog;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

fn csv_bytes(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    write(&mut w)?;
    w.into_inner().map_err(|e| crate::error::RgmError::Format(e.to_string()))
}

pub fn pagerank_csv(pr: &PageRankResult) -> Result<Vec<u8>> {
    let rank = pr.rank_index();
    csv_bytes(|w| {
        w.write_record(["node_id", "probability", "global_rank"])?;
        for (node, p) in pr.p.iter().enumerate() {
            w.write_record([node.to_string(), fmt_f64(*p), rank[node].to_string()])?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
pub struct PageRankSummary {
    pub alpha: f64,
    pub iterations: usize,
    pub residual: f64,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub dangling: usize,
}

/// Members in local order, with global and per-category indices.
pub fn local_rank_csv(ranking: &[LocalRank], pr: &PageRankResult, subset: &SubsetSpec) -> Result<Vec<u8>> {
    let global = pr.rank_index();
    let mut per_cat: std::collections::HashMap<&str, usize> = Default::default();
    csv_bytes(|w| {
        w.write_record([
            "node_id",
            "display_name",
            "category",
            "probability",
            "global_rank",
            "local_rank",
            "category_rank",
        ])?;
        for l in ranking {
            let e = subset.entry(l.member);
            let c = per_cat.entry(e.category.as_str()).or_default();
            *c += 1;
            w.write_record([
                l.node.to_string(),
                e.display_name.clone(),
                e.category.clone(),
                fmt_f64(l.probability),
                global[l.node].to_string(),
                l.local_index.to_string(),
                c.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Matrix with a header row and column of member display names.
pub fn matrix_csv(m: &DenseMatrix, subset: &SubsetSpec) -> Result<Vec<u8>> {
    let names: Vec<&str> = subset.entries().iter().map(|e| e.display_name.as_str()).collect();
    csv_bytes(|w| {
        let mut header = vec![""];
        header.extend(&names);
        w.write_record(&header)?;
        for (i, name) in names.iter().enumerate() {
            let mut row = vec![name.to_string()];
            row.extend((0..m.cols()).map(|j| fmt_f64(m[(i, j)])));
            w.write_record(&row)?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
pub struct WeightsJson {
    pub wrr: f64,
    pub wpr: f64,
    pub wqr: f64,
}

#[derive(Serialize)]
pub struct ReducedSidecar {
    pub lambda_c: Option<f64>,
    pub weights: WeightsJson,
    pub series_terms: usize,
    pub truncation_error: f64,
    pub nr: usize,
}

impl ReducedSidecar {
    pub fn new(rs: &ReducedSet) -> Self {
        let w = rs.weights;
        Self {
            lambda_c: rs.lambda_c,
            weights: WeightsJson { wrr: w.wrr, wpr: w.wpr, wqr: w.wqr },
            series_terms: rs.series_terms,
            truncation_error: rs.truncation_error,
            nr: rs.nr(),
        }
    }
}

pub fn weights_csv(rs: &ReducedSet) -> Result<Vec<u8>> {
    let w = rs.weights;
    csv_bytes(|wr| {
        wr.write_record(["wrr", "wpr", "wqr"])?;
        wr.write_record([fmt_f64(w.wrr), fmt_f64(w.wpr), fmt_f64(w.wqr)])
    })
}

pub fn reduced_pagerank_csv(rs: &ReducedSet, subset: &SubsetSpec) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["node_id", "display_name", "category", "probability", "local_rank"])?;
        for l in rs.local_ranking() {
            let e = subset.entry(l.member);
            w.write_record([
                l.node.to_string(),
                e.display_name.clone(),
                e.category.clone(),
                fmt_f64(l.probability),
                l.local_index.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Long-form `row_member,col_member,component,value` over members of
/// `category` (all members when `None`), both axes in local rank order.
pub fn heatmap_csv(rs: &ReducedSet, subset: &SubsetSpec, category: Option<&str>) -> Result<Vec<u8>> {
    let order: Vec<usize> = rs
        .local_ranking()
        .into_iter()
        .map(|l| l.member)
        .filter(|&m| category.is_none_or(|c| subset.entry(m).category == c))
        .collect();
    let gqr = rs.gqr();
    let components: [(&str, &DenseMatrix); 6] = [
        ("gr", &rs.gr),
        ("grr", &rs.grr),
        ("gpr", &rs.gpr),
        ("gqr", &gqr),
        ("gqrd", &rs.gqrd),
        ("gqrnd", &rs.gqrnd),
    ];
    csv_bytes(|w| {
        w.write_record(["row_member", "col_member", "component", "value"])?;
        for (name, m) in components {
            for &i in &order {
                for &j in &order {
                    w.write_record([
                        subset.entry(i).display_name.as_str(),
                        subset.entry(j).display_name.as_str(),
                        name,
                        &fmt_f64(m[(i, j)]),
                    ])?;
                }
            }
        }
        Ok(())
    })
}

#[derive(Serialize)]
pub struct SensitivityMeta {
    pub delta: f64,
    pub value_min: Option<f64>,
    pub value_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

/// One perturbation: row label `source->target`, one column per member.
pub fn sensitivity_csv(rep: &SensitivityReport, subset: &SubsetSpec) -> Result<Vec<u8>> {
    let p = rep.perturbation;
    let row = format!("{}->{}", subset.entry(p.source()).display_name, subset.entry(p.target()).display_name);
    csv_bytes(|w| {
        w.write_record(["row_label", "col_label", "value"])?;
        for (k, d) in rep.d.iter().enumerate() {
            w.write_record([row.as_str(), subset.entry(k).display_name.as_str(), &fmt_f64(*d)])?;
        }
        Ok(())
    })
}

pub fn table_csv(t: &SensitivityTable, subset: &SubsetSpec) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["row_label", "col_label", "value"])?;
        for (r, &rm) in t.rows.iter().enumerate() {
            for (c, &cm) in t.cols.iter().enumerate() {
                w.write_record([
                    subset.entry(rm).display_name.as_str(),
                    subset.entry(cm).display_name.as_str(),
                    &fmt_f64(t.get(r, c)),
                ])?;
            }
        }
        Ok(())
    })
}

/// Countries (rows, keyed by abbreviation) by groups (columns), the input of
/// one map per group.
pub fn worldmap_csv(t: &SensitivityTable, subset: &SubsetSpec) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        let mut header = vec!["abbr".to_string()];
        header.extend(t.cols.iter().map(|&g| subset.entry(g).display_name.clone()));
        w.write_record(&header)?;
        for (r, &rm) in t.rows.iter().enumerate() {
            let mut row = vec![subset.entry(rm).short_label().to_string()];
            row.extend((0..t.cols.len()).map(|c| fmt_f64(t.get(r, c))));
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn table_meta(t: &SensitivityTable) -> SensitivityMeta {
    let range = t.range();
    SensitivityMeta { delta: t.delta, value_min: range.map(|r| r.0), value_max: range.map(|r| r.1), source: None, target: None }
}

pub fn friends_edges_csv(net: &FriendNetwork, subset: &SubsetSpec) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["from", "to", "weight", "generation"])?;
        for e in &net.edges {
            w.write_record([
                subset.entry(e.from).display_name.as_str(),
                subset.entry(e.to).display_name.as_str(),
                &fmt_f64(e.weight),
                &e.generation.to_string(),
            ])?;
        }
        Ok(())
    })
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn node_id(member: usize) -> String {
    format!("m{member}")
}

pub fn friends_gexf(net: &FriendNetwork, catalog: &Catalog) -> String {
    let subset = &catalog.subset;
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    s.push_str("  <graph mode=\"static\" defaultedgetype=\"directed\">\n");
    s.push_str("    <attributes class=\"node\">\n");
    for (id, title, ty) in [
        (0, "category", "string"),
        (1, "color", "string"),
        (2, "pagerank", "double"),
        (3, "seed", "boolean"),
        (4, "generation", "integer"),
        (5, "node_id", "integer"),
    ] {
        let _ = writeln!(s, "      <attribute id=\"{id}\" title=\"{title}\" type=\"{ty}\"/>");
    }
    s.push_str("    </attributes>\n    <attributes class=\"edge\">\n");
    s.push_str("      <attribute id=\"0\" title=\"generation\" type=\"integer\"/>\n");
    s.push_str("    </attributes>\n    <nodes>\n");
    for n in &net.nodes {
        let e = subset.entry(n.member);
        let _ = writeln!(s, "      <node id=\"{}\" label=\"{}\">", node_id(n.member), xml_escape(&e.display_name));
        s.push_str("        <attvalues>\n");
        let values = [
            xml_escape(&n.category),
            xml_escape(catalog.color_of(&n.category)),
            fmt_f64(n.pagerank),
            n.seed.to_string(),
            n.generation.to_string(),
            e.node.to_string(),
        ];
        for (id, v) in values.iter().enumerate() {
            let _ = writeln!(s, "          <attvalue for=\"{id}\" value=\"{v}\"/>");
        }
        s.push_str("        </attvalues>\n      </node>\n");
    }
    s.push_str("    </nodes>\n    <edges>\n");
    for (k, e) in net.edges.iter().enumerate() {
        let _ = writeln!(
            s,
            "      <edge id=\"{k}\" source=\"{}\" target=\"{}\" weight=\"{}\">",
            node_id(e.from),
            node_id(e.to),
            fmt_f64(e.weight)
        );
        let _ = writeln!(s, "        <attvalues><attvalue for=\"0\" value=\"{}\"/></attvalues>", e.generation);
        s.push_str("      </edge>\n");
    }
    s.push_str("    </edges>\n  </graph>\n</gexf>\n");
    s
}

fn dot_color(tag: &str) -> &str {
    match tag {
        "BL" => "blue",
        "RD" => "red",
        "OR" => "orange",
        "GN" => "green",
        "PK" => "pink",
        "BK" => "black",
        "CY" => "cyan",
        "GY" => "gray",
        other => other,
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn friends_dot(net: &FriendNetwork, catalog: &Catalog) -> String {
    let subset = &catalog.subset;
    let mut s = String::from("digraph friends {\n  node [shape=circle, style=filled];\n");
    for n in &net.nodes {
        let e = subset.entry(n.member);
        let tag = catalog.color_of(&n.category);
        let _ = writeln!(
            s,
            "  {} [label=\"{}\", category=\"{}\", colortag=\"{}\", fillcolor=\"{}\", pagerank={}, seed={}, generation={}, node_id={}];",
            node_id(n.member),
            dot_escape(&e.display_name),
            dot_escape(&n.category),
            dot_escape(tag),
            dot_escape(dot_color(tag)),
            fmt_f64(n.pagerank),
            n.seed,
            n.generation,
            e.node
        );
    }
    for e in &net.edges {
        let _ = writeln!(
            s,
            "  {} -> {} [weight={}, generation={}];",
            node_id(e.from),
            node_id(e.to),
            fmt_f64(e.weight),
            e.generation
        );
    }
    s.push_str("}\n");
    s
}
