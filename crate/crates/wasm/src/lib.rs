//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The `#[wasm_bindgen]` exports are thin wrappers over the plain functions
//! in this file, which return JSON strings and are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use currimap_core::corpus::{CorpusFormat, NormalizationRules};
use currimap_core::graphops::TreeMode;
use currimap_core::pipeline::{self, PipelineConfig};
use currimap_core::report;

/// The five-course fixture corpus the page starts with.
pub const SAMPLE_CORPUS: &str = include_str!("../../core/tests/fixtures/five_courses.json");
pub const SAMPLE_RULES: &str = include_str!("../../core/tests/fixtures/rules.csv");

#[derive(Debug, Serialize)]
struct NodeView {
    topic: String,
    community: usize,
    frequency: u64,
}

#[derive(Debug, Serialize)]
struct EdgeView {
    source: String,
    target: String,
    weight: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    topics: usize,
    network_edges: usize,
    threshold_nodes: usize,
    scc_nodes: usize,
    scc_edges: usize,
    communities: usize,
    modularity: f64,
    root: String,
    total_distance: f64,
}

#[derive(Debug, Serialize)]
struct AnalysisView {
    summary: Summary,
    nodes: Vec<NodeView>,
    edges: Vec<EdgeView>,
    backbone: Vec<EdgeView>,
}

#[derive(Debug, Serialize)]
struct WordView {
    topic: String,
    count: u64,
    size: f64,
}

fn parse_rules(rules_csv: &str) -> Result<NormalizationRules, String> {
    if rules_csv.trim().is_empty() {
        return Ok(NormalizationRules::empty());
    }
    NormalizationRules::from_csv_str(rules_csv).map_err(|e| e.to_string())
}

fn format_of(text: &str) -> CorpusFormat {
    CorpusFormat::detect(std::path::Path::new(""), text)
}

/// Runs the whole pipeline and returns the filtered network, its communities
/// and the backbone as JSON.
pub fn analyze_json(
    corpus: &str,
    rules_csv: &str,
    min_edge_weight: u64,
    seed: u64,
    resolution: f64,
    tree_mode: &str,
) -> Result<String, String> {
    let rules = parse_rules(rules_csv)?;
    let config = PipelineConfig {
        min_edge_weight,
        seed,
        resolution,
        tree_mode: tree_mode.parse::<TreeMode>().map_err(|e| e.to_string())?,
        ..PipelineConfig::default()
    };
    let out = pipeline::run_bytes(corpus.as_bytes(), format_of(corpus), &rules, None, &config)
        .map_err(|e| e.to_string())?;
    let s = &out.manifest.stages;
    let view = AnalysisView {
        summary: Summary {
            topics: s.network.nodes,
            network_edges: s.network.edges,
            threshold_nodes: s.threshold.nodes,
            scc_nodes: s.largest_scc.nodes,
            scc_edges: s.largest_scc.edges,
            communities: s.communities.count,
            modularity: s.communities.modularity,
            root: out.backbone.root.to_string(),
            total_distance: out.backbone.total_distance,
        },
        nodes: out
            .partition
            .assignment
            .iter()
            .map(|(t, &c)| NodeView {
                topic: t.to_string(),
                community: c,
                frequency: out.frequencies.count(t.as_str()).unwrap_or(0),
            })
            .collect(),
        edges: out
            .filtered
            .edges()
            .map(|(s, t, &w)| EdgeView {
                source: s.to_string(),
                target: t.to_string(),
                weight: w as f64,
            })
            .collect(),
        backbone: out
            .backbone
            .edges
            .iter()
            .map(|e| EdgeView {
                source: e.parent.to_string(),
                target: e.child.to_string(),
                weight: e.distance,
            })
            .collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Top-k (with ties) topics and their square-root-scaled word-cloud sizes.
pub fn word_cloud_json(
    corpus: &str,
    rules_csv: &str,
    top_k: usize,
    max_size: f64,
    per_course: bool,
) -> Result<String, String> {
    if top_k == 0 {
        return Err("top-k must be at least 1".into());
    }
    if !(max_size > 0.0 && max_size.is_finite()) {
        return Err("maximum size must be positive".into());
    }
    let rules = parse_rules(rules_csv)?;
    let corpus = currimap_core::corpus::parse_corpus(corpus, format_of(corpus), "corpus", &rules)
        .map_err(|e| e.to_string())?;
    let unit = if per_course {
        report::FrequencyUnit::Course
    } else {
        report::FrequencyUnit::Module
    };
    let top = report::top_k_with_ties(&report::topic_frequencies_by(&corpus, unit), top_k);
    let words: Vec<WordView> = report::wordcloud_sizes(&top, max_size)
        .into_iter()
        .map(|(t, size)| WordView {
            count: top.count(t.as_str()).unwrap_or(0),
            topic: t.into_string(),
            size,
        })
        .collect();
    serde_json::to_string(&words).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn sample_corpus() -> String {
    SAMPLE_CORPUS.to_string()
}

#[wasm_bindgen]
pub fn sample_rules() -> String {
    SAMPLE_RULES.to_string()
}

#[wasm_bindgen]
pub fn analyze(
    corpus: &str,
    rules_csv: &str,
    min_edge_weight: u32,
    seed: u32,
    resolution: f64,
    tree_mode: &str,
) -> Result<String, JsValue> {
    analyze_json(
        corpus,
        rules_csv,
        min_edge_weight.into(),
        seed.into(),
        resolution,
        tree_mode,
    )
    .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn word_cloud(
    corpus: &str,
    rules_csv: &str,
    top_k: u32,
    max_size: f64,
    per_course: bool,
) -> Result<String, JsValue> {
    word_cloud_json(corpus, rules_csv, top_k as usize, max_size, per_course)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fold_label(raw: &str) -> Result<String, JsValue> {
    currimap_core::fold_label(raw)
        .map(|t| t.into_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}
