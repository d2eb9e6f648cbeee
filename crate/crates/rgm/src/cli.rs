// SPDX-License-Identifier: Apache-2.0

//! Subcommands and their artifact sets.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rgm_core::graph::SelfLoopPolicy;
use rgm_core::netstruct::{self, CandidateFilter, FriendNetwork};
use rgm_core::sensitivity::{self, Perturbation, SensitivityReport};
use rgm_core::{google, reduced, DirectedGraph, EdgePolicy, PageRankResult, ReducedSet};

use crate::config::RunConfig;
use crate::error::{Result, RgmError};
use crate::export::{self, PageRankSummary, ReducedSidecar, SensitivityMeta};
use crate::io::{self, Catalog};
use crate::manifest::{ArtifactWriter, Manifest};

#[derive(Debug, Parser)]
#[command(name = "rgm", version, about = "Reduced Google matrix analysis of directed networks")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Validate inputs and print the planned artifacts without computing.
    #[arg(long, global = true)]
    pub manifest_only: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    PageRank,
    Reduce,
    Sensitivity,
    Friends,
    Pipeline,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::PageRank => "pagerank",
            Stage::Reduce => "reduce",
            Stage::Sensitivity => "sensitivity",
            Stage::Friends => "friends",
            Stage::Pipeline => "pipeline",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global PageRank, plus the local ranking when a subset is given.
    Pagerank {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reduced Google matrix of a subset and its components.
    Reduce {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// PageRank sensitivity to boosted reduced links.
    Sensitivity {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[command(flatten)]
        sens: SensitivityArgs,
    },
    /// Friend networks from the direct plus hidden links.
    Friends {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[command(flatten)]
        friends: FriendArgs,
    },
    /// Every stage in one run.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[command(flatten)]
        sens: SensitivityArgs,
        #[command(flatten)]
        friends: FriendArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Edge list: one `source target` pair per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Subset table: `node<TAB>category<TAB>name[<TAB>abbreviation]`.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    /// Node labels, one per line in node order.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub drop_self_loops: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub series_tol: Option<f64>,
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Columns propagated together through the hidden-path series.
    #[arg(long)]
    pub batch_width: Option<usize>,
    /// Limit the heat map to one category.
    #[arg(long)]
    pub heatmap_category: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SensitivityArgs {
    /// Member whose outgoing link is boosted.
    #[arg(long)]
    pub source: Option<String>,
    /// Member receiving the boosted link.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Country by group table of self-sensitivities.
    #[arg(long)]
    pub influence_map: bool,
    /// Group by country table for links leaving this country.
    #[arg(long)]
    pub country_link: Option<String>,
    /// Category holding the countries.
    #[arg(long)]
    pub country_category: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FriendArgs {
    /// Friends selected per member.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated seed members; category leaders by default.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<String>,
    /// Only select friends from these categories.
    #[arg(long, value_delimiter = ',', conflicts_with = "exclude")]
    pub only: Vec<String>,
    /// Never select friends from these categories.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Friends per member outside the country category.
    #[arg(long)]
    pub k_groups: Option<usize>,
    /// Friends per member inside the country category.
    #[arg(long)]
    pub k_countries: Option<usize>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl CommonArgs {
    fn apply(self, c: &mut RunConfig) {
        c.graph = self.graph.or(c.graph.take());
        c.subset = self.subset.or(c.subset.take());
        c.labels = self.labels.or(c.labels.take());
        set(&mut c.out, self.out);
        set(&mut c.alpha, self.alpha);
        set(&mut c.tol, self.tol);
        set(&mut c.max_iters, self.max_iters);
        c.drop_self_loops |= self.drop_self_loops;
    }
}

impl ReduceArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.series_tol, self.series_tol);
        set(&mut c.max_terms, self.max_terms);
        set(&mut c.batch_width, self.batch_width);
        c.reduce.heatmap_category = self.heatmap_category.or(c.reduce.heatmap_category.take());
    }
}

impl SensitivityArgs {
    fn apply(self, c: &mut RunConfig) {
        let s = &mut c.sensitivity;
        s.source = self.source.or(s.source.take());
        s.target = self.target.or(s.target.take());
        s.influence_map |= self.influence_map;
        s.country_link = self.country_link.or(s.country_link.take());
        set(&mut c.delta, self.delta);
        set(&mut c.country_category, self.country_category);
    }
}

impl FriendArgs {
    fn apply(self, c: &mut RunConfig) {
        let f = &mut c.friends;
        set(&mut f.k, self.k);
        if !self.seeds.is_empty() {
            f.seeds = self.seeds;
        }
        if !self.only.is_empty() {
            f.only = self.only;
            f.exclude.clear();
        }
        if !self.exclude.is_empty() {
            f.exclude = self.exclude;
            f.only.clear();
        }
        f.k_groups = self.k_groups.or(f.k_groups);
        f.k_countries = self.k_countries.or(f.k_countries);
    }
}

impl Cli {
    /// Stage and merged configuration.
    pub fn resolve(self) -> Result<(Stage, RunConfig, bool)> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let stage = match self.command {
            Command::Pagerank { common } => {
                common.apply(&mut cfg);
                Stage::PageRank
            }
            Command::Reduce { common, reduce } => {
                common.apply(&mut cfg);
                reduce.apply(&mut cfg);
                Stage::Reduce
            }
            Command::Sensitivity { common, reduce, sens } => {
                common.apply(&mut cfg);
                reduce.apply(&mut cfg);
                sens.apply(&mut cfg);
                Stage::Sensitivity
            }
            Command::Friends { common, reduce, friends } => {
                common.apply(&mut cfg);
                reduce.apply(&mut cfg);
                friends.apply(&mut cfg);
                Stage::Friends
            }
            Command::Pipeline { common, reduce, sens, friends } => {
                common.apply(&mut cfg);
                reduce.apply(&mut cfg);
                sens.apply(&mut cfg);
                friends.apply(&mut cfg);
                Stage::Pipeline
            }
        };
        cfg.threads = self.threads.or(cfg.threads);
        Ok((stage, cfg, self.manifest_only))
    }
}

fn sensitivity_requested(cfg: &RunConfig) -> bool {
    let s = &cfg.sensitivity;
    s.source.is_some() || s.target.is_some() || s.influence_map || s.country_link.is_some()
}

fn country_link_stem(key: &str) -> String {
    let safe: String = key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("country_link_{safe}")
}

/// Artifact names a run will produce, in write order.
pub fn planned_artifacts(stage: Stage, cfg: &RunConfig) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut add = |names: &[&str]| out.extend(names.iter().map(|s| s.to_string()));
    let pagerank = matches!(stage, Stage::PageRank | Stage::Pipeline);
    let reduce = matches!(stage, Stage::Reduce | Stage::Pipeline);
    let sens = stage == Stage::Sensitivity || (stage == Stage::Pipeline && sensitivity_requested(cfg));
    let friends = matches!(stage, Stage::Friends | Stage::Pipeline);
    if pagerank {
        add(&["pagerank.csv", "pagerank.json"]);
        if cfg.subset.is_some() {
            add(&["local_rank.csv"]);
        }
    }
    if reduce {
        add(&[
            "gr.csv",
            "grr.csv",
            "gpr.csv",
            "gqrd.csv",
            "gqrnd.csv",
            "reduced.json",
            "weights.csv",
            "heatmap.csv",
            "reduced_pagerank.csv",
        ]);
    }
    if sens {
        let s = &cfg.sensitivity;
        if s.source.is_some() || s.target.is_some() {
            add(&["sensitivity.csv", "sensitivity.json"]);
        }
        if s.influence_map {
            add(&["influence_map.csv", "influence_map.json", "worldmap.csv"]);
        }
        if let Some(c) = &s.country_link {
            let stem = country_link_stem(c);
            add(&[&format!("{stem}.csv"), &format!("{stem}.json")]);
        }
    }
    if friends {
        add(&["friends.gexf", "friends.dot", "friends_edges.csv"]);
    }
    out
}

struct Inputs {
    graph: DirectedGraph,
    catalog: Option<Catalog>,
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let policy = EdgePolicy {
        self_loops: if cfg.drop_self_loops { SelfLoopPolicy::Drop } else { SelfLoopPolicy::Keep },
        ..EdgePolicy::default()
    };
    let graph_path = cfg.graph.as_ref().expect("validated");
    let (mut graph, _) = io::load_edge_list(graph_path, policy)?;
    if let Some(path) = &cfg.labels {
        let labels = io::load_labels(path, graph.num_nodes())?;
        graph = graph.with_labels(labels)?;
    }
    let catalog = cfg.subset.as_ref().map(|p| io::load_subset(p, &graph)).transpose()?;
    Ok(Inputs { graph, catalog })
}

fn member(catalog: &Catalog, key: &str) -> Result<usize> {
    catalog.find_member(key).ok_or_else(|| RgmError::Config(format!("unknown subset member `{key}`")))
}

fn check_categories(catalog: &Catalog, cats: &[String]) -> Result<()> {
    let known = catalog.subset.categories();
    match cats.iter().find(|c| !known.contains(&c.as_str())) {
        Some(c) => Err(RgmError::Config(format!("unknown category `{c}`"))),
        None => Ok(()),
    }
}

fn groups_and_countries(cfg: &RunConfig, catalog: &Catalog) -> Result<(Vec<usize>, Vec<usize>)> {
    let s = &catalog.subset;
    let countries = s.members_in(&cfg.country_category);
    if countries.is_empty() {
        return Err(RgmError::Config(format!("no members in country category `{}`", cfg.country_category)));
    }
    let groups: Vec<usize> = (0..s.len()).filter(|m| !countries.contains(m)).collect();
    if groups.is_empty() {
        return Err(RgmError::Config("no members outside the country category".into()));
    }
    Ok((groups, countries))
}

fn write_pagerank(w: &mut ArtifactWriter, inputs: &Inputs, pr: &PageRankResult, cfg: &RunConfig) -> Result<()> {
    w.write("pagerank.csv", export::pagerank_csv(pr)?)?;
    let report = inputs.graph.report();
    w.write_json(
        "pagerank.json",
        &PageRankSummary {
            alpha: cfg.alpha,
            iterations: pr.iterations,
            residual: pr.residual,
            num_nodes: report.num_nodes,
            num_edges: report.num_edges,
            dangling: report.dangling,
        },
    )?;
    if let Some(cat) = &inputs.catalog {
        let ranking = google::local_rank(pr, &cat.subset);
        w.write("local_rank.csv", export::local_rank_csv(&ranking, pr, &cat.subset)?)?;
    }
    Ok(())
}

fn write_reduced(w: &mut ArtifactWriter, rs: &ReducedSet, cfg: &RunConfig, catalog: &Catalog) -> Result<()> {
    let s = &catalog.subset;
    if let Some(c) = &cfg.reduce.heatmap_category {
        check_categories(catalog, std::slice::from_ref(c))?;
    }
    for (name, m) in [("gr", &rs.gr), ("grr", &rs.grr), ("gpr", &rs.gpr), ("gqrd", &rs.gqrd), ("gqrnd", &rs.gqrnd)] {
        w.write(&format!("{name}.csv"), export::matrix_csv(m, s)?)?;
    }
    w.write_json("reduced.json", &ReducedSidecar::new(rs))?;
    w.write("weights.csv", export::weights_csv(rs)?)?;
    w.write("heatmap.csv", export::heatmap_csv(rs, s, cfg.reduce.heatmap_category.as_deref())?)?;
    w.write("reduced_pagerank.csv", export::reduced_pagerank_csv(rs, s)?)?;
    Ok(())
}

fn single_meta(rep: &SensitivityReport, catalog: &Catalog) -> SensitivityMeta {
    let p = rep.perturbation;
    let lo = rep.d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rep.d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SensitivityMeta {
        delta: p.delta(),
        value_min: Some(lo),
        value_max: Some(hi),
        source: Some(catalog.subset.entry(p.source()).display_name.clone()),
        target: Some(catalog.subset.entry(p.target()).display_name.clone()),
    }
}

fn write_sensitivity(w: &mut ArtifactWriter, rs: &ReducedSet, cfg: &RunConfig, catalog: &Catalog) -> Result<()> {
    let s = &cfg.sensitivity;
    if !sensitivity_requested(cfg) {
        return Err(RgmError::Config(
            "nothing to compute: give --source and --target, --influence-map or --country-link".into(),
        ));
    }
    let subset = &catalog.subset;
    match (&s.source, &s.target) {
        (Some(a), Some(b)) => {
            let pert = Perturbation::new(member(catalog, a)?, member(catalog, b)?, cfg.delta)?;
            let rep = sensitivity::sensitivity(rs, &pert)?;
            w.write("sensitivity.csv", export::sensitivity_csv(&rep, subset)?)?;
            w.write_json("sensitivity.json", &single_meta(&rep, catalog))?;
        }
        (None, None) => {}
        _ => return Err(RgmError::Config("--source and --target must be given together".into())),
    }
    if s.influence_map || s.country_link.is_some() {
        let (groups, countries) = groups_and_countries(cfg, catalog)?;
        if s.influence_map {
            let t = sensitivity::influence_map(rs, &groups, &countries, cfg.delta)?;
            w.write("influence_map.csv", export::table_csv(&t, subset)?)?;
            w.write_json("influence_map.json", &export::table_meta(&t))?;
            w.write("worldmap.csv", export::worldmap_csv(&t, subset)?)?;
        }
        if let Some(c) = &s.country_link {
            let country = member(catalog, c)?;
            let t = sensitivity::country_link_matrix(rs, country, &groups, &countries, cfg.delta)?;
            let stem = country_link_stem(c);
            let mut meta = export::table_meta(&t);
            meta.source = Some(subset.entry(country).display_name.clone());
            w.write(&format!("{stem}.csv"), export::table_csv(&t, subset)?)?;
            w.write_json(&format!("{stem}.json"), &meta)?;
        }
    }
    Ok(())
}

/// Friend network for the configured seeds and quotas.
pub fn friend_network(rs: &ReducedSet, cfg: &RunConfig, catalog: &Catalog) -> Result<FriendNetwork> {
    let subset = &catalog.subset;
    let f = &cfg.friends;
    let seeds = if f.seeds.is_empty() {
        netstruct::category_leaders(rs, subset)
    } else {
        f.seeds.iter().map(|k| member(catalog, k)).collect::<Result<Vec<_>>>()?
    };
    if f.k_groups.is_some() || f.k_countries.is_some() {
        if !subset.categories().contains(&cfg.country_category.as_str()) {
            return Err(RgmError::Config(format!("no members in country category `{}`", cfg.country_category)));
        }
        let kg = f.k_groups.unwrap_or(f.k);
        let kc = f.k_countries.unwrap_or(f.k);
        return Ok(netstruct::bipartite_closure(rs, subset, &seeds, kg, kc, &cfg.country_category)?);
    }
    check_categories(catalog, &f.only)?;
    check_categories(catalog, &f.exclude)?;
    let filter = if !f.only.is_empty() {
        CandidateFilter::Only(f.only.clone())
    } else if !f.exclude.is_empty() {
        CandidateFilter::Except(f.exclude.clone())
    } else {
        CandidateFilter::Any
    };
    Ok(netstruct::friend_closure(rs, subset, &seeds, f.k, &filter)?)
}

fn write_friends(w: &mut ArtifactWriter, rs: &ReducedSet, cfg: &RunConfig, catalog: &Catalog) -> Result<()> {
    let net = friend_network(rs, cfg, catalog)?;
    w.write("friends.gexf", export::friends_gexf(&net, catalog))?;
    w.write("friends.dot", export::friends_dot(&net, catalog))?;
    w.write("friends_edges.csv", export::friends_edges_csv(&net, &catalog.subset)?)?;
    Ok(())
}

fn compute(stage: Stage, cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let g = cfg.google();
    if matches!(stage, Stage::PageRank | Stage::Pipeline) {
        let pr = google::pagerank(&inputs.graph, &g)?;
        write_pagerank(w, &inputs, &pr, cfg)?;
    }
    if stage == Stage::PageRank {
        return Ok(());
    }
    let catalog = inputs.catalog.as_ref().expect("validated");
    let rs = reduced::compute_reduced(&inputs.graph, &g, &catalog.subset, &cfg.reduced())?;
    if matches!(stage, Stage::Reduce | Stage::Pipeline) {
        write_reduced(w, &rs, cfg, catalog)?;
    }
    if stage == Stage::Sensitivity || (stage == Stage::Pipeline && sensitivity_requested(cfg)) {
        write_sensitivity(w, &rs, cfg, catalog)?;
    }
    if matches!(stage, Stage::Friends | Stage::Pipeline) {
        write_friends(w, &rs, cfg, catalog)?;
    }
    Ok(())
}

#[derive(Debug)]
pub enum Outcome {
    Planned(Vec<String>),
    Written(Manifest),
}

/// Runs one stage. Artifacts written before a failure are removed.
pub fn run(stage: Stage, cfg: &RunConfig, manifest_only: bool) -> Result<Outcome> {
    cfg.validate(stage != Stage::PageRank)?;
    if manifest_only {
        return Ok(Outcome::Planned(planned_artifacts(stage, cfg)));
    }
    let work = || -> Result<Manifest> {
        let mut w = ArtifactWriter::create(&cfg.out)?;
        match compute(stage, cfg, &mut w) {
            Ok(()) => w.finish(Manifest {
                tool: "rgm",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: stage.name().to_string(),
                config_hash: cfg.hash(),
                config: serde_json::to_value(cfg)?,
                artifacts: Vec::new(),
            }),
            Err(e) => {
                w.abort();
                Err(e)
            }
        }
    };
    let manifest = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| RgmError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(Outcome::Written(manifest))
}

/// Parses arguments and runs; the command-line entry point.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> Result<Outcome> {
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => e.exit(),
        _ => RgmError::Config(e.to_string().lines().next().unwrap_or("invalid arguments").to_string()),
    })?;
    let (stage, cfg, manifest_only) = cli.resolve()?;
    run(stage, &cfg, manifest_only)
}
