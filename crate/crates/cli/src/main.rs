//! `currimap`: build and analyze curriculum topic networks.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 I/O failure, 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use currimap_core::corpus::{self, CorpusError, NormalizationRules};
use currimap_core::graphops::{self, GraphError, LouvainOptions, TreeMode};
use currimap_core::pipeline::{self, ErrorClass, PipelineConfig, PipelineError};
use currimap_core::report::{
    self, ExportFormat, FrequencyUnit, GraphDocument, GraphKind, GraphRef, ReportError,
};
use currimap_core::topicnet;

#[derive(Parser)]
#[command(
    name = "currimap",
    version,
    about = "Curriculum topic network analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write all outputs plus a manifest.
    Pipeline(PipelineArgs),
    /// Fold and rewrite a corpus into canonical JSON.
    Ingest(CorpusArgs),
    /// Topic frequency table (optionally top-k with ties, or word-cloud sizes).
    Freq(FreqArgs),
    /// Build the weighted topic network from a corpus.
    Build(CorpusArgs),
    /// Drop edges below a weight threshold.
    Filter(FilterArgs),
    /// Keep the largest strongly connected component.
    Scc(GraphArgs),
    /// Louvain communities as a `topic,community_id` CSV.
    Communities(CommunityArgs),
    /// Spanning-tree backbone over inverted weights.
    Mst(MstArgs),
    /// Convert a graph JSON document to another format.
    Export(ExportArgs),
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// TOML configuration; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    min_edge_weight: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    tree_mode: Option<TreeMode>,
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    frequency_unit: Option<FrequencyUnit>,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// `pattern,replacement` CSV.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FreqArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "module")]
    unit: FrequencyUnit,
    /// Keep the top k entries plus ties.
    #[arg(long)]
    top_k: Option<usize>,
    /// Emit `topic,size` word-cloud sizes with this maximum instead of counts.
    #[arg(long)]
    wordcloud: Option<f64>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON document.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 3)]
    min_edge_weight: u64,
}

#[derive(Args)]
struct CommunityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
}

#[derive(Args)]
struct MstArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value = "arborescence")]
    tree_mode: TreeMode,
    #[arg(long)]
    root: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    format: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    fn io(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e.class() {
            ErrorClass::Io => Failure::io(e),
            ErrorClass::Validation => Failure::validation(e),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => Failure::io(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io { .. } => Failure::io(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::validation(e)
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, contents).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_rules(path: Option<&Path>) -> Result<NormalizationRules, Failure> {
    match path {
        Some(p) => Ok(NormalizationRules::load(p)?),
        None => Ok(NormalizationRules::empty()),
    }
}

fn load_corpus(args: &CorpusArgs) -> Result<corpus::Corpus, Failure> {
    let rules = load_rules(args.rules.as_deref())?;
    Ok(corpus::load_corpus(&args.corpus, &rules)?)
}

fn load_network(path: &Path) -> Result<topicnet::TopicNetwork, Failure> {
    Ok(GraphDocument::load(path)?.into_network()?)
}

fn run_pipeline(args: PipelineArgs) -> Result<(), Failure> {
    let mut config = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = args.rules {
        config.rules_path = Some(v);
    }
    if let Some(v) = args.min_edge_weight {
        config.min_edge_weight = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.restarts {
        config.restarts = v;
    }
    if let Some(v) = args.resolution {
        config.resolution = v;
    }
    if let Some(v) = args.tree_mode {
        config.tree_mode = v;
    }
    if let Some(v) = args.root {
        config.root = Some(v);
    }
    if let Some(v) = args.frequency_unit {
        config.frequency_unit = v;
    }
    if let Some(v) = args.top_k {
        config.top_k = v;
    }
    if let Some(v) = args.out {
        config.output_dir = v;
    }
    config.validate()?;
    let output = pipeline::run_file(&args.corpus, &config)?;
    pipeline::write_outputs(&output, &config.output_dir)?;
    let s = &output.manifest.stages;
    eprintln!(
        "{} topics -> {} after threshold {} -> {} in largest SCC; {} communities (Q = {:.4}); backbone rooted at {:?} (total distance {:.4})",
        s.network.nodes,
        s.threshold.nodes,
        config.min_edge_weight,
        s.largest_scc.nodes,
        s.communities.count,
        s.communities.modularity,
        s.backbone.root.as_str(),
        s.backbone.total_distance,
    );
    eprintln!("wrote outputs to {}", config.output_dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Pipeline(args) => run_pipeline(args),
        Command::Ingest(args) => {
            let corpus = load_corpus(&args)?;
            emit(args.out.as_deref(), &corpus.to_json())
        }
        Command::Freq(args) => {
            let corpus = load_corpus(&args.corpus)?;
            let mut table = report::topic_frequencies_by(&corpus, args.unit);
            if let Some(k) = args.top_k {
                if k == 0 {
                    return Err(Failure::validation("--top-k must be at least 1"));
                }
                table = report::top_k_with_ties(&table, k);
            }
            let text = match args.wordcloud {
                Some(max) if max > 0.0 => {
                    pipeline::render_wordcloud(&report::wordcloud_sizes(&table, max))
                }
                Some(_) => return Err(Failure::validation("--wordcloud must be positive")),
                None => table.to_csv(),
            };
            emit(args.corpus.out.as_deref(), &text)
        }
        Command::Build(args) => {
            let net = topicnet::build_network(&load_corpus(&args)?);
            emit(
                args.out.as_deref(),
                &report::render_graph(GraphRef::Network(&net), ExportFormat::Json),
            )
        }
        Command::Filter(args) => {
            if args.min_edge_weight < 1 {
                return Err(Failure::validation("--min-edge-weight must be at least 1"));
            }
            let net = load_network(&args.graph.input)?;
            let out = graphops::threshold(&net, args.min_edge_weight);
            emit(
                args.graph.out.as_deref(),
                &report::render_graph(GraphRef::Network(&out), ExportFormat::Json),
            )
        }
        Command::Scc(args) => {
            let net = load_network(&args.input)?;
            let out = graphops::largest_scc(&net)?;
            emit(
                args.out.as_deref(),
                &report::render_graph(GraphRef::Network(&out), ExportFormat::Json),
            )
        }
        Command::Communities(args) => {
            let net = load_network(&args.graph.input)?;
            let partition = graphops::detect_communities_with(
                &net,
                &LouvainOptions {
                    seed: args.seed,
                    resolution: args.resolution,
                    restarts: args.restarts,
                },
            )?;
            emit(
                args.graph.out.as_deref(),
                &report::render_partition(&partition),
            )
        }
        Command::Mst(args) => {
            let doc = GraphDocument::load(&args.graph.input)?;
            let distances = match doc.kind {
                GraphKind::Network => graphops::invert_weights(&doc.into_network()?),
                GraphKind::Distance => doc.into_distance()?,
                GraphKind::Backbone => {
                    return Err(Failure::validation(
                        "mst expects a network or distance graph, not a backbone",
                    ))
                }
            };
            let root = args.root.as_deref().map(Into::into);
            let tree = graphops::spanning_tree(&distances, args.tree_mode, root.as_ref())?;
            emit(
                args.graph.out.as_deref(),
                &report::render_graph(GraphRef::Backbone(&tree), ExportFormat::Json),
            )
        }
        Command::Export(args) => {
            let format: ExportFormat = args.format.parse()?;
            let doc = GraphDocument::load(&args.graph.input)?;
            let text = match doc.kind {
                GraphKind::Network => {
                    let net = doc.into_network()?;
                    report::render_graph(GraphRef::Network(&net), format)
                }
                GraphKind::Distance => {
                    let net = doc.into_distance()?;
                    report::render_graph(GraphRef::Distance(&net), format)
                }
                GraphKind::Backbone => {
                    let tree = doc.into_backbone()?;
                    report::render_graph(GraphRef::Backbone(&tree), format)
                }
            };
            emit(args.graph.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}
