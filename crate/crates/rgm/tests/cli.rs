// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rgm::cli::{main_with, Outcome};
use rgm_core::subset::SubsetEntry;
use rgm_core::{reduced, sensitivity, DirectedGraph, EdgePolicy, GoogleParams, SubsetSpec};
use sha2::{Digest, Sha256};

const FIXTURE: &str = "0\t1\n1\t2\n2\t0\n2\t3\n3\t4\n4\t2\n";
const FIXTURE_SUBSET: &str = "0\tcountry\tAland\tAL\n2\tcountry\tBorduria\tBO\n4\tgroup\tXylos\n";

struct Case {
    dir: tempfile::TempDir,
}

impl Case {
    fn new(edges: &str, subset: Option<&str>) -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("graph.tsv"), edges).unwrap();
        if let Some(s) = subset {
            fs::write(dir.path().join("subset.tsv"), s).unwrap();
        }
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn args(&self, sub: &str, out: &str, extra: &[&str]) -> Vec<OsString> {
        let mut a: Vec<OsString> = vec!["rgm".into(), sub.into(), "--graph".into(), self.path("graph.tsv").into()];
        if self.path("subset.tsv").exists() {
            a.push("--subset".into());
            a.push(self.path("subset.tsv").into());
        }
        a.push("--out".into());
        a.push(self.path(out).into());
        a.extend(extra.iter().map(OsString::from));
        a
    }

    fn run(&self, sub: &str, out: &str, extra: &[&str]) -> rgm::error::Result<Outcome> {
        main_with(self.args(sub, out, extra))
    }

    fn read(&self, out: &str, name: &str) -> String {
        fs::read_to_string(self.path(out).join(name)).unwrap()
    }
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

fn fixture_core() -> (DirectedGraph, SubsetSpec) {
    let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)];
    let (g, _) = DirectedGraph::from_edges(5, edges, EdgePolicy::default()).unwrap();
    let s = SubsetSpec::new(
        5,
        vec![
            SubsetEntry::new(0, "country", "Aland").with_abbreviation("AL"),
            SubsetEntry::new(2, "country", "Borduria").with_abbreviation("BO"),
            SubsetEntry::new(4, "group", "Xylos"),
        ],
    )
    .unwrap();
    (g, s)
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut m = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        m.insert(e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap());
    }
    m
}

#[test]
fn three_cycle_is_uniform() {
    let case = Case::new("0\t1\n1\t2\n2\t0\n", None);
    case.run("pagerank", "out", &[]).unwrap();
    let p = csv_column(&case.read("out", "pagerank.csv"), 1);
    assert_eq!(p.len(), 3);
    for v in p {
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
    }
}

#[test]
fn full_subset_has_unit_direct_weight() {
    let case = Case::new("0\t1\n1\t2\n2\t0\n2\t1\n", Some("0\tc\ta\n1\tc\tb\n2\tc\tc\n"));
    case.run("reduce", "out", &[]).unwrap();
    assert_eq!(case.read("out", "weights.csv"), "wrr,wpr,wqr\n1,0,0\n");
    let sidecar: serde_json::Value = serde_json::from_str(&case.read("out", "reduced.json")).unwrap();
    assert!(sidecar["lambda_c"].is_null());
}

#[test]
fn fixture_pipeline_matches_core() {
    let case = Case::new(FIXTURE, Some(FIXTURE_SUBSET));
    let extra = ["--source", "AL", "--target", "Xylos", "--influence-map", "--country-link", "BO", "--k", "1"];
    let Outcome::Written(manifest) = case.run("pipeline", "out", &extra).unwrap() else { panic!() };
    let (g, s) = fixture_core();
    let oracle = reduced::dense_oracle_reduced(&g, &GoogleParams::default(), &s).unwrap();

    // gr.csv: header row of names, then one row per member.
    let gr = case.read("out", "gr.csv");
    for (i, line) in gr.lines().skip(1).enumerate() {
        for (j, v) in line.split(',').skip(1).enumerate() {
            let v: f64 = v.parse().unwrap();
            assert!((v - oracle.gr[(i, j)]).abs() < 1e-9, "gr({i},{j}) {v} vs {}", oracle.gr[(i, j)]);
        }
    }
    let rs = reduced::compute_reduced(&g, &GoogleParams::default(), &s, &Default::default()).unwrap();
    let pert = sensitivity::Perturbation::new(0, 2, 0.03).unwrap();
    let rep = sensitivity::sensitivity(&rs, &pert).unwrap();
    let d = csv_column(&case.read("out", "sensitivity.csv"), 2);
    assert_eq!(d, rep.d);

    let influence = case.read("out", "influence_map.csv");
    assert_eq!(influence.lines().count(), 3, "two countries by one group");
    assert!(case.read("out", "worldmap.csv").starts_with("abbr,Xylos\nAL,"));
    assert!(case.path("out").join("country_link_BO.csv").exists());
    assert!(case.read("out", "friends.gexf").contains("<gexf"));
    assert!(case.read("out", "friends.dot").starts_with("digraph"));

    let names: Vec<&str> = manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
    assert!(names.contains(&"pagerank.csv") && names.contains(&"friends_edges.csv"));
}

#[test]
fn manifest_lists_every_artifact_with_hashes() {
    let case = Case::new(FIXTURE, Some(FIXTURE_SUBSET));
    let extra = ["--influence-map"];
    let Outcome::Planned(planned) = case.run("pipeline", "out", &[extra[0], "--manifest-only"]).unwrap() else {
        panic!()
    };
    assert!(!case.path("out").exists(), "dry run writes nothing");
    case.run("pipeline", "out", &extra).unwrap();
    let files = artifacts(&case.path("out"));
    let manifest: serde_json::Value = serde_json::from_slice(&files["manifest.json"]).unwrap();
    let listed = manifest["artifacts"].as_array().unwrap();
    assert_eq!(listed.len() + 1, files.len());
    let mut planned = planned;
    planned.sort();
    let names: Vec<String> = listed.iter().map(|a| a["path"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, planned);
    for a in listed {
        let bytes = &files[a["path"].as_str().unwrap()];
        assert_eq!(a["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(a["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(bytes)));
    }
    assert_eq!(manifest["subcommand"], "pipeline");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn outputs_are_reproducible_across_runs_and_threads() {
    let mut edges = String::new();
    for i in 0..300u64 {
        for k in 1..4 {
            let j = (i * 7919 + k * 104_729) % 300;
            if j != i && i % 17 != 0 {
                edges.push_str(&format!("{i}\t{j}\n"));
            }
        }
    }
    edges.insert_str(0, "N 300\n");
    let subset: String = (0..12).map(|m| format!("{}\t{}\tm{m}\n", m * 23, if m < 6 { "country" } else { "group" })).collect();
    let case = Case::new(&edges, Some(&subset));
    let extra = ["--influence-map", "--k-groups", "2", "--k-countries", "1"];
    for (out, threads) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let mut e = extra.to_vec();
        e.extend(["--threads", threads]);
        case.run("pipeline", out, &e).unwrap();
    }
    let mut a = artifacts(&case.path("a"));
    let mut b = artifacts(&case.path("b"));
    let mut c = artifacts(&case.path("c"));
    let ma: serde_json::Value = serde_json::from_slice(&a.remove("manifest.json").unwrap()).unwrap();
    let mc: serde_json::Value = serde_json::from_slice(&c.remove("manifest.json").unwrap()).unwrap();
    b.remove("manifest.json");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(ma["artifacts"], mc["artifacts"]);
    assert_eq!(ma["config_hash"], mc["config_hash"]);
}

#[test]
fn failed_run_leaves_no_partial_outputs() {
    let case = Case::new(FIXTURE, Some(FIXTURE_SUBSET));
    // The unknown member is only detected after PageRank and the reduced
    // matrices have been written.
    let err = case.run("pipeline", "out", &["--source", "AL", "--target", "Nowhere"]).unwrap_err();
    assert_eq!(err.category(), "config");
    assert!(!case.path("out").exists());

    fs::create_dir(case.path("kept")).unwrap();
    fs::write(case.path("kept").join("notes.txt"), "mine").unwrap();
    case.run("friends", "kept", &["--only", "nope"]).unwrap_err();
    let left: Vec<String> = artifacts(&case.path("kept")).into_keys().collect();
    assert_eq!(left, ["notes.txt"]);
}

#[test]
fn config_file_values_yield_to_flags() {
    let case = Case::new(FIXTURE, Some(FIXTURE_SUBSET));
    let cfg = case.path("run.toml");
    fs::write(&cfg, "alpha = 0.5\n[friends]\nk = 2\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let Outcome::Written(m) = case.run("pagerank", "a", &["--config", cfg_s]).unwrap() else { panic!() };
    assert_eq!(m.config["alpha"], 0.5);
    assert_eq!(m.config["friends"]["k"], 2);
    let Outcome::Written(m) = case.run("pagerank", "b", &["--config", cfg_s, "--alpha", "0.85"]).unwrap() else {
        panic!()
    };
    assert_eq!(m.config["alpha"], 0.85);
    assert_eq!(case.read("b", "pagerank.csv"), {
        case.run("pagerank", "c", &[]).unwrap();
        case.read("c", "pagerank.csv")
    });
}

#[test]
fn binary_reports_one_line_errors() {
    let case = Case::new("0 1\n1 x\n", None);
    let bin = env!("CARGO_BIN_EXE_rgm");
    let run = |args: &[OsString]| Command::new(bin).args(&args[1..]).output().unwrap();

    let out = run(&case.args("pagerank", "out", &[]));
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[parse]") && err.contains(":2"), "{err}");

    let out = Command::new(bin).args(["reduce", "--graph", "/nonexistent"]).output().unwrap();
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[config]"), "{err}");

    let out = Command::new(bin).args(["pagerank", "--alpha"]).output().unwrap();
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[config]"), "{err}");

    let out = Command::new(bin).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("rgm "));
}
