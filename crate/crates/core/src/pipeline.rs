//! End-to-end run: load, build, aggregate, count, threshold, keep the largest
//! strongly connected component, detect communities, invert weights, extract
//! the backbone and write everything plus a JSON manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{self, Corpus, CorpusError, CorpusFormat, NormalizationRules, Topic};
use crate::graphops::{self, Backbone, CommunityPartition, GraphError, LouvainOptions, TreeMode};
use crate::report::{self, ExportFormat, FrequencyTable, FrequencyUnit, GraphRef, ReportError};
use crate::topicnet::{self, DistanceNetwork, EdgeKind, TopicNetwork};

fn default_min_edge_weight() -> u64 {
    3
}
fn default_restarts() -> usize {
    8
}
fn default_resolution() -> f64 {
    1.0
}
fn default_top_k() -> usize {
    20
}
fn default_wordcloud_max() -> f64 {
    100.0
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Every knob of a pipeline run. Missing TOML fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub rules_path: Option<PathBuf>,
    #[serde(default = "default_min_edge_weight")]
    pub min_edge_weight: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default)]
    pub tree_mode: TreeMode,
    #[serde(default)]
    pub root: Option<String>,
    #[serde(default)]
    pub frequency_unit: FrequencyUnit,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default = "default_wordcloud_max")]
    pub wordcloud_max_size: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            rules_path: None,
            min_edge_weight: default_min_edge_weight(),
            seed: 0,
            restarts: default_restarts(),
            resolution: default_resolution(),
            tree_mode: TreeMode::default(),
            root: None,
            frequency_unit: FrequencyUnit::default(),
            output_dir: default_output_dir(),
            top_k: default_top_k(),
            wordcloud_max_size: default_wordcloud_max(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let config: Self = toml::from_str(text)
            .map_err(|e| PipelineError::new(Stage::Config, StageError::Config(e.to_string())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|source| {
            PipelineError::new(
                Stage::Config,
                StageError::Io {
                    path: path.to_path_buf(),
                    source,
                },
            )
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::new(Stage::Config, StageError::Config(msg)));
        if self.min_edge_weight < 1 {
            return fail("min_edge_weight must be at least 1".into());
        }
        if self.restarts < 1 {
            return fail("restarts must be at least 1".into());
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return fail(format!(
                "resolution must be positive, got {}",
                self.resolution
            ));
        }
        if self.top_k < 1 {
            return fail("top_k must be at least 1".into());
        }
        if !(self.wordcloud_max_size > 0.0 && self.wordcloud_max_size.is_finite()) {
            return fail("wordcloud_max_size must be positive".into());
        }
        Ok(())
    }

    pub fn louvain(&self) -> LouvainOptions {
        LouvainOptions {
            seed: self.seed,
            resolution: self.resolution,
            restarts: self.restarts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Build,
    Threshold,
    Scc,
    Communities,
    Backbone,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Build => "build",
            Stage::Threshold => "threshold",
            Stage::Scc => "scc",
            Stage::Communities => "communities",
            Stage::Backbone => "backbone",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Io,
}

#[derive(Debug, Error)]
#[error("stage {stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: StageError,
}

impl PipelineError {
    pub fn new(stage: Stage, source: impl Into<StageError>) -> Self {
        PipelineError {
            stage,
            source: source.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match &self.source {
            StageError::Io { .. }
            | StageError::Corpus(CorpusError::Io { .. })
            | StageError::Report(ReportError::Io { .. }) => ErrorClass::Io,
            _ => ErrorClass::Validation,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub corpus_sha256: String,
    pub corpus_format: String,
    pub rules_sha256: Option<String>,
    pub rule_count: usize,
}

/// The subset of [`PipelineConfig`] that affects results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub min_edge_weight: u64,
    pub seed: u64,
    pub restarts: usize,
    pub resolution: f64,
    pub tree_mode: TreeMode,
    pub root: Option<String>,
    pub frequency_unit: FrequencyUnit,
    pub top_k: usize,
    pub wordcloud_max_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphCounts {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
}

impl GraphCounts {
    fn of(net: &TopicNetwork) -> Self {
        GraphCounts {
            nodes: net.node_count(),
            edges: net.edge_count(),
            total_weight: net.total_weight(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub courses: usize,
    pub modules: usize,
    pub topics: usize,
    pub topic_occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultigraphCounts {
    pub nodes: usize,
    pub edges: usize,
    pub intra_edges: usize,
    pub inter_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityCounts {
    pub count: usize,
    pub modularity: f64,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackboneCounts {
    pub mode: TreeMode,
    pub root: Topic,
    pub edges: usize,
    pub total_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCounts {
    pub corpus: CorpusCounts,
    pub multigraph: MultigraphCounts,
    pub network: GraphCounts,
    pub threshold: GraphCounts,
    pub largest_scc: GraphCounts,
    pub communities: CommunityCounts,
    pub backbone: BackboneCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTopic {
    pub topic: Topic,
    pub count: u64,
}

/// Machine-readable run summary; a pure function of the inputs and config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub input: InputRecord,
    pub config: ConfigRecord,
    pub stages: StageCounts,
    pub top_topics: Vec<RankedTopic>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }
}

/// All intermediate results of one run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub corpus: Corpus,
    pub frequencies: FrequencyTable,
    pub top_topics: FrequencyTable,
    pub wordcloud: Vec<(Topic, f64)>,
    pub network: TopicNetwork,
    pub thresholded: TopicNetwork,
    pub filtered: TopicNetwork,
    pub partition: CommunityPartition,
    pub distances: DistanceNetwork,
    pub backbone: Backbone,
    pub manifest: Manifest,
}

/// Names of the files [`write_outputs`] produces, in write order.
pub const OUTPUT_FILES: &[&str] = &[
    "corpus.json",
    "frequencies.csv",
    "top_topics.csv",
    "wordcloud.csv",
    "network.json",
    "network.csv",
    "filtered.json",
    "filtered.dot",
    "filtered.graphml",
    "filtered.csv",
    "communities.csv",
    "distances.json",
    "backbone.json",
    "backbone.dot",
    "backbone.graphml",
    "backbone.csv",
    "manifest.json",
];

/// Runs every analysis stage on an already-normalized corpus.
pub fn analyze(
    corpus: Corpus,
    config: &PipelineConfig,
    input: InputRecord,
) -> Result<PipelineOutput, PipelineError> {
    config.validate()?;
    let frequencies = report::topic_frequencies_by(&corpus, config.frequency_unit);
    let top_topics = report::top_k_with_ties(&frequencies, config.top_k);
    let wordcloud = report::wordcloud_sizes(&frequencies, config.wordcloud_max_size);

    let multigraph = topicnet::build_multigraph(&corpus);
    let intra = multigraph
        .edges
        .iter()
        .filter(|e| e.provenance.kind == EdgeKind::Intra)
        .count();
    let network = topicnet::aggregate(&multigraph);
    let thresholded = graphops::threshold(&network, config.min_edge_weight);
    let filtered =
        graphops::largest_scc(&thresholded).map_err(|e| PipelineError::new(Stage::Scc, e))?;
    let partition = graphops::detect_communities_with(&filtered, &config.louvain())
        .map_err(|e| PipelineError::new(Stage::Communities, e))?;
    let distances = graphops::invert_weights(&filtered);
    let root = config.root.as_deref().map(Topic::from);
    let backbone = graphops::spanning_tree(&distances, config.tree_mode, root.as_ref())
        .map_err(|e| PipelineError::new(Stage::Backbone, e))?;

    let manifest = Manifest {
        tool: "currimap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input,
        config: ConfigRecord {
            min_edge_weight: config.min_edge_weight,
            seed: config.seed,
            restarts: config.restarts,
            resolution: config.resolution,
            tree_mode: config.tree_mode,
            root: config.root.clone(),
            frequency_unit: config.frequency_unit,
            top_k: config.top_k,
            wordcloud_max_size: config.wordcloud_max_size,
        },
        stages: StageCounts {
            corpus: CorpusCounts {
                courses: corpus.courses.len(),
                modules: corpus.module_count(),
                topics: multigraph.nodes.len(),
                topic_occurrences: corpus
                    .courses
                    .iter()
                    .flat_map(|c| c.modules.iter())
                    .map(|m| m.len())
                    .sum(),
            },
            multigraph: MultigraphCounts {
                nodes: multigraph.nodes.len(),
                edges: multigraph.edge_count(),
                intra_edges: intra,
                inter_edges: multigraph.edge_count() - intra,
            },
            network: GraphCounts::of(&network),
            threshold: GraphCounts::of(&thresholded),
            largest_scc: GraphCounts::of(&filtered),
            communities: CommunityCounts {
                count: partition.community_count(),
                modularity: partition.modularity,
                sizes: partition.communities().iter().map(Vec::len).collect(),
            },
            backbone: BackboneCounts {
                mode: config.tree_mode,
                root: backbone.root.clone(),
                edges: backbone.edges.len(),
                total_distance: backbone.total_distance,
            },
        },
        top_topics: top_topics
            .entries()
            .iter()
            .map(|(t, c)| RankedTopic {
                topic: t.clone(),
                count: *c,
            })
            .collect(),
        outputs: OUTPUT_FILES.iter().map(|s| s.to_string()).collect(),
    };

    Ok(PipelineOutput {
        corpus,
        frequencies,
        top_topics,
        wordcloud,
        network,
        thresholded,
        filtered,
        partition,
        distances,
        backbone,
        manifest,
    })
}

/// Parses corpus bytes and runs [`analyze`].
pub fn run_bytes(
    corpus_bytes: &[u8],
    format: CorpusFormat,
    rules: &NormalizationRules,
    rules_sha256: Option<String>,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let text = std::str::from_utf8(corpus_bytes).map_err(|e| {
        PipelineError::new(
            Stage::Load,
            CorpusError::Validation(format!("corpus is not valid UTF-8: {e}")),
        )
    })?;
    let corpus = corpus::parse_corpus(text, format, "corpus", rules)
        .map_err(|e| PipelineError::new(Stage::Load, e))?;
    let input = InputRecord {
        corpus_sha256: sha256_hex(corpus_bytes),
        corpus_format: match format {
            CorpusFormat::Json => "json".into(),
            CorpusFormat::Tsv => "tsv".into(),
        },
        rules_sha256,
        rule_count: rules.len(),
    };
    analyze(corpus, config, input)
}

fn read_bytes(stage: Stage, path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|source| {
        PipelineError::new(
            stage,
            StageError::Io {
                path: path.to_path_buf(),
                source,
            },
        )
    })
}

/// Loads the corpus (and rules, if configured) from disk and runs everything.
pub fn run_file(
    corpus_path: &Path,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    config.validate()?;
    let (rules, rules_sha256) = match &config.rules_path {
        Some(path) => {
            let bytes = read_bytes(Stage::Config, path)?;
            let text = String::from_utf8_lossy(&bytes);
            let rules = NormalizationRules::from_csv_str(&text)
                .map_err(|e| PipelineError::new(Stage::Config, e))?;
            (rules, Some(sha256_hex(&bytes)))
        }
        None => (NormalizationRules::empty(), None),
    };
    let bytes = read_bytes(Stage::Load, corpus_path)?;
    let format = CorpusFormat::detect(corpus_path, &String::from_utf8_lossy(&bytes));
    run_bytes(&bytes, format, &rules, rules_sha256, config)
}

pub fn render_wordcloud(sizes: &[(Topic, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["topic", "size"]).expect("in-memory write");
    for (t, s) in sizes {
        w.write_record([t.as_str(), &s.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Renders every output file in memory, keyed by [`OUTPUT_FILES`] name.
pub fn render_outputs(out: &PipelineOutput) -> Vec<(&'static str, String)> {
    use report::render_graph;
    let net = GraphRef::Network(&out.network);
    let filtered = GraphRef::Network(&out.filtered);
    let tree = GraphRef::Backbone(&out.backbone);
    vec![
        ("corpus.json", out.corpus.to_json()),
        ("frequencies.csv", out.frequencies.to_csv()),
        ("top_topics.csv", out.top_topics.to_csv()),
        ("wordcloud.csv", render_wordcloud(&out.wordcloud)),
        ("network.json", render_graph(net, ExportFormat::Json)),
        ("network.csv", render_graph(net, ExportFormat::Csv)),
        ("filtered.json", render_graph(filtered, ExportFormat::Json)),
        ("filtered.dot", render_graph(filtered, ExportFormat::Dot)),
        (
            "filtered.graphml",
            render_graph(filtered, ExportFormat::Graphml),
        ),
        ("filtered.csv", render_graph(filtered, ExportFormat::Csv)),
        ("communities.csv", report::render_partition(&out.partition)),
        (
            "distances.json",
            render_graph(GraphRef::Distance(&out.distances), ExportFormat::Json),
        ),
        ("backbone.json", render_graph(tree, ExportFormat::Json)),
        ("backbone.dot", render_graph(tree, ExportFormat::Dot)),
        (
            "backbone.graphml",
            render_graph(tree, ExportFormat::Graphml),
        ),
        ("backbone.csv", render_graph(tree, ExportFormat::Csv)),
        ("manifest.json", out.manifest.to_json()),
    ]
}

/// Writes every output into `dir`, creating it if needed.
pub fn write_outputs(out: &PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let io_err = |path: &Path, source| {
        PipelineError::new(
            Stage::Export,
            StageError::Io {
                path: path.to_path_buf(),
                source,
            },
        )
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for (name, contents) in render_outputs(out) {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
