// SPDX-License-Identifier: Apache-2.0

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One selected node with its catalog metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetEntry {
    pub node: usize,
    pub category: String,
    pub display_name: String,
    /// Short code, e.g. a country abbreviation.
    pub abbreviation: Option<String>,
}

impl SubsetEntry {
    pub fn new(node: usize, category: impl Into<String>, display_name: impl Into<String>) -> Self {
        Self { node, category: category.into(), display_name: display_name.into(), abbreviation: None }
    }

    pub fn with_abbreviation(mut self, abbr: impl Into<String>) -> Self {
        self.abbreviation = Some(abbr.into());
        self
    }

    /// Abbreviation if present, otherwise the display name.
    pub fn short_label(&self) -> &str {
        self.abbreviation.as_deref().unwrap_or(&self.display_name)
    }
}

/// Ordered selection of distinct nodes. Member order is the row and column
/// order of every reduced matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpec {
    entries: Vec<SubsetEntry>,
    position: BTreeMap<usize, usize>,
}

impl SubsetSpec {
    pub fn new(num_nodes: usize, entries: Vec<SubsetEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySubset);
        }
        if entries.len() > num_nodes {
            return Err(Error::SubsetTooLarge { members: entries.len(), num_nodes });
        }
        let mut position = BTreeMap::new();
        for (idx, e) in entries.iter().enumerate() {
            if e.node >= num_nodes {
                return Err(Error::NodeOutOfRange { id: e.node, num_nodes });
            }
            if position.insert(e.node, idx).is_some() {
                return Err(Error::DuplicateMember(e.node));
            }
        }
        Ok(Self { entries, position })
    }

    /// Subset of plain node ids, all tagged with `category`.
    pub fn from_nodes(num_nodes: usize, nodes: &[usize], category: &str) -> Result<Self> {
        let entries = nodes
            .iter()
            .map(|&n| SubsetEntry::new(n, category, alloc::format!("{n}")))
            .collect();
        Self::new(num_nodes, entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[SubsetEntry] {
        &self.entries
    }

    pub fn entry(&self, member: usize) -> &SubsetEntry {
        &self.entries[member]
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.node).collect()
    }

    /// Member index of a graph node, if selected.
    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.position.get(&node).copied()
    }

    /// Member indices tagged with `category`, in member order.
    pub fn members_in(&self, category: &str) -> Vec<usize> {
        (0..self.len()).filter(|&m| self.entries[m].category == category).collect()
    }

    /// Distinct categories in order of first appearance.
    pub fn categories(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.category.as_str()) {
                out.push(&e.category);
            }
        }
        out
    }

    pub(crate) fn check_member(&self, member: usize) -> Result<()> {
        if member < self.len() {
            Ok(())
        } else {
            Err(Error::MemberOutOfRange { index: member, size: self.len() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn keeps_file_order() {
        let s = SubsetSpec::new(
            10,
            vec![SubsetEntry::new(7, "a", "x"), SubsetEntry::new(2, "b", "y"), SubsetEntry::new(5, "a", "z")],
        )
        .unwrap();
        assert_eq!(s.nodes(), vec![7, 2, 5]);
        assert_eq!(s.position_of(5), Some(2));
        assert_eq!(s.members_in("a"), vec![0, 2]);
        assert_eq!(s.categories(), vec!["a", "b"]);
    }

    #[test]
    fn rejects_bad_members() {
        assert_eq!(SubsetSpec::new(3, vec![]).unwrap_err(), Error::EmptySubset);
        assert_eq!(
            SubsetSpec::from_nodes(3, &[0, 3], "c").unwrap_err(),
            Error::NodeOutOfRange { id: 3, num_nodes: 3 }
        );
        assert_eq!(SubsetSpec::from_nodes(3, &[1, 1], "c").unwrap_err(), Error::DuplicateMember(1));
        assert!(matches!(
            SubsetSpec::from_nodes(1, &[0, 0], "c"),
            Err(Error::SubsetTooLarge { .. })
        ));
    }
}
