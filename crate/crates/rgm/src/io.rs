// SPDX-License-Identifier: Apache-2.0

//! Text input formats: edge lists, node label maps and subset catalogs.
//!
//! Edge list: one `source<TAB>target` pair per line (any whitespace is
//! accepted), `#` comments and blank lines ignored, and an optional first
//! record `N <count>` declaring the node count. Without it the node count is
//! one past the largest id seen.
//!
//! Catalog: `node<TAB>category<TAB>display name[<TAB>abbreviation]` per line.
//! `node` is a numeric id, or a label when a label map is loaded. Lines of the
//! form `@color<TAB>category<TAB>color` assign a drawing color to a category.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rgm_core::graph::{DirectedGraph, EdgePolicy, ValidationReport};
use rgm_core::subset::{SubsetEntry, SubsetSpec};

use crate::error::{Result, RgmError};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| RgmError::io(path, e))
}

fn content_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (idx, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| RgmError::io(path, e))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        out.push((idx + 1, trimmed.to_string()));
    }
    Ok(out)
}

/// Reads an edge list into a validated graph.
pub fn load_edge_list(path: &Path, policy: EdgePolicy) -> Result<(DirectedGraph, ValidationReport)> {
    let lines = content_lines(path)?;
    let mut declared = None;
    let mut edges = Vec::new();
    for (pos, (line_no, line)) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if pos == 0 && fields.first() == Some(&"N") {
            let n = match fields.as_slice() {
                [_, n] => n.parse::<usize>().ok(),
                _ => None,
            };
            declared = Some(n.ok_or_else(|| RgmError::parse(path, *line_no, "expected `N <count>`"))?);
            continue;
        }
        let [s, t] = fields.as_slice() else {
            return Err(RgmError::parse(path, *line_no, format!("expected two node ids, got `{line}`")));
        };
        let parse = |f: &str| {
            f.parse::<usize>().map_err(|_| RgmError::parse(path, *line_no, format!("`{f}` is not a node id")))
        };
        let (s, t) = (parse(s)?, parse(t)?);
        if let Some(n) = declared {
            for id in [s, t] {
                if id >= n {
                    return Err(RgmError::parse(path, *line_no, format!("node id {id} out of declared range 0..{n}")));
                }
            }
        }
        edges.push((s, t));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(s, t)| s.max(t) + 1).max().unwrap_or(0));
    if n == 0 {
        return Err(RgmError::parse(path, 0, "empty graph"));
    }
    Ok(DirectedGraph::from_edges(n, edges, policy)?)
}

/// Writes `graph` in edge-list form, with an `N` header line.
pub fn write_edge_list(graph: &DirectedGraph, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "N {}", graph.num_nodes())?;
    for (s, t) in graph.edges() {
        writeln!(w, "{s}\t{t}")?;
    }
    Ok(())
}

/// Reads `node_id<TAB>label` lines; unmapped nodes are labelled by their id.
pub fn load_labels(path: &Path, num_nodes: usize) -> Result<Vec<String>> {
    let mut labels: Vec<String> = (0..num_nodes).map(|i| i.to_string()).collect();
    for (line_no, line) in content_lines(path)? {
        let (id, label) = line
            .split_once('\t')
            .ok_or_else(|| RgmError::parse(path, line_no, "expected `node_id<TAB>label`"))?;
        let id: usize =
            id.trim().parse().map_err(|_| RgmError::parse(path, line_no, format!("`{id}` is not a node id")))?;
        if id >= num_nodes {
            return Err(RgmError::parse(path, line_no, format!("node id {id} out of range 0..{num_nodes}")));
        }
        labels[id] = label.to_string();
    }
    Ok(labels)
}

/// Palette for categories without an explicit color.
const PALETTE: [&str; 8] = ["BL", "RD", "OR", "GN", "PK", "BK", "CY", "GY"];

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub subset: SubsetSpec,
    /// Category to color tag, for every category in the subset.
    pub colors: BTreeMap<String, String>,
}

impl Catalog {
    pub fn color_of(&self, category: &str) -> &str {
        self.colors.get(category).map(String::as_str).unwrap_or("GY")
    }

    /// Resolves a member by display name, abbreviation or node id.
    pub fn find_member(&self, key: &str) -> Option<usize> {
        let entries = self.subset.entries();
        entries
            .iter()
            .position(|e| e.display_name == key)
            .or_else(|| entries.iter().position(|e| e.abbreviation.as_deref() == Some(key)))
            .or_else(|| key.parse::<usize>().ok().and_then(|id| self.subset.position_of(id)))
    }
}

pub fn load_subset(path: &Path, graph: &DirectedGraph) -> Result<Catalog> {
    let by_label: Option<HashMap<&str, usize>> =
        graph.labels().map(|l| l.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect());
    let n = graph.num_nodes();
    let mut entries = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut explicit: BTreeMap<String, String> = BTreeMap::new();
    for (line_no, line) in content_lines(path)? {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[0] == "@color" {
            let [_, cat, color] = fields.as_slice() else {
                return Err(RgmError::parse(path, line_no, "expected `@color<TAB>category<TAB>color`"));
            };
            explicit.insert(cat.to_string(), color.to_string());
            continue;
        }
        if !(3..=4).contains(&fields.len()) {
            return Err(RgmError::parse(
                path,
                line_no,
                "expected `node_id<TAB>category<TAB>display name[<TAB>abbreviation]`",
            ));
        }
        let key = fields[0].trim();
        let node = match key.parse::<usize>() {
            Ok(id) => id,
            Err(_) => by_label
                .as_ref()
                .and_then(|m| m.get(key).copied())
                .ok_or_else(|| RgmError::parse(path, line_no, format!("unknown node `{key}`")))?,
        };
        if node >= n {
            return Err(RgmError::parse(path, line_no, format!("unknown node id {node} (graph has {n} nodes)")));
        }
        if let Some(first) = seen.insert(node, line_no) {
            return Err(RgmError::parse(
                path,
                line_no,
                format!("node {node} listed twice, on lines {first} and {line_no}"),
            ));
        }
        let mut e = SubsetEntry::new(node, fields[1].trim(), fields[2].trim());
        if let Some(abbr) = fields.get(3).map(|s| s.trim()).filter(|s| !s.is_empty()) {
            e = e.with_abbreviation(abbr);
        }
        entries.push(e);
    }
    if entries.is_empty() {
        return Err(RgmError::parse(path, 0, "empty subset"));
    }
    let subset = SubsetSpec::new(n, entries)?;
    let mut colors = BTreeMap::new();
    let mut next = 0;
    for cat in subset.categories() {
        let color = explicit.get(cat).cloned().unwrap_or_else(|| {
            let c = PALETTE[next % PALETTE.len()].to_string();
            next += 1;
            c
        });
        colors.insert(cat.to_string(), color);
    }
    Ok(Catalog { subset, colors })
}
