// SPDX-License-Identifier: Apache-2.0

//! Run configuration: defaults, an optional TOML file, then command-line
//! flags, each layer overriding the previous one.

use std::path::{Path, PathBuf};

use rgm_core::{GoogleParams, ReducedParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, RgmError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub subset: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub out: PathBuf,
    pub alpha: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub series_tol: f64,
    pub max_terms: usize,
    pub batch_width: usize,
    pub delta: f64,
    pub threads: Option<usize>,
    pub drop_self_loops: bool,
    pub country_category: String,
    pub reduce: ReduceOptions,
    pub sensitivity: SensitivityOptions,
    pub friends: FriendOptions,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReduceOptions {
    /// Restricts the heat-map export to one category.
    pub heatmap_category: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityOptions {
    pub source: Option<String>,
    pub target: Option<String>,
    pub influence_map: bool,
    pub country_link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FriendOptions {
    pub k: usize,
    /// Seed members; category leaders when empty.
    pub seeds: Vec<String>,
    pub only: Vec<String>,
    pub exclude: Vec<String>,
    /// Setting either quota switches to the group/country closure.
    pub k_groups: Option<usize>,
    pub k_countries: Option<usize>,
}

impl Default for FriendOptions {
    fn default() -> Self {
        Self { k: 4, seeds: Vec::new(), only: Vec::new(), exclude: Vec::new(), k_groups: None, k_countries: None }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GoogleParams::default();
        let r = ReducedParams::default();
        Self {
            graph: None,
            subset: None,
            labels: None,
            out: PathBuf::from("out"),
            alpha: g.alpha,
            tol: g.tol,
            max_iters: g.max_iters,
            series_tol: r.series_tol,
            max_terms: r.max_terms,
            batch_width: r.batch_width,
            delta: rgm_core::sensitivity::DEFAULT_DELTA,
            threads: None,
            drop_self_loops: false,
            country_category: "country".into(),
            reduce: ReduceOptions::default(),
            sensitivity: SensitivityOptions::default(),
            friends: FriendOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| RgmError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RgmError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn google(&self) -> GoogleParams {
        GoogleParams { alpha: self.alpha, tol: self.tol, max_iters: self.max_iters }
    }

    pub fn reduced(&self) -> ReducedParams {
        ReducedParams {
            series_tol: self.series_tol,
            max_terms: self.max_terms,
            batch_width: self.batch_width,
            ..ReducedParams::default()
        }
    }

    /// Hex SHA-256 of the canonical JSON form. The thread count and output
    /// directory are left out since they never change results.
    pub fn hash(&self) -> String {
        let canon = Self { threads: None, out: PathBuf::new(), ..self.clone() };
        let json = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn validate(&self, needs_subset: bool) -> Result<()> {
        let graph = self.graph.as_ref().ok_or_else(|| RgmError::Config("--graph is required".into()))?;
        let mut required = vec![("graph", graph)];
        if needs_subset {
            let subset = self.subset.as_ref().ok_or_else(|| RgmError::Config("--subset is required".into()))?;
            required.push(("subset", subset));
        }
        if let Some(l) = &self.labels {
            required.push(("labels", l));
        }
        for (what, p) in required {
            if !p.is_file() {
                return Err(RgmError::Config(format!("{what} file {} does not exist", p.display())));
            }
        }
        self.google().validate()?;
        self.reduced().validate()?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(RgmError::Config(format!("delta {} must be positive", self.delta)));
        }
        if self.friends.k == 0 {
            return Err(RgmError::Config("friends k must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(RgmError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}
