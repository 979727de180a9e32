//! Frequency analytics and serialization of graphs and partitions.

mod export;
mod frequency;

use std::path::PathBuf;

use thiserror::Error;

pub use export::{
    export_graph, export_partition, parse_partition, render_graph, render_partition, EdgeRecord,
    EdgeValue, ExportFormat, GraphDocument, GraphKind, GraphRef,
};
pub use frequency::{
    top_k_with_ties, topic_frequencies, topic_frequencies_by, wordcloud_sizes, FrequencyTable,
    FrequencyUnit,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown export format {0:?} (expected dot, graphml, json or csv)")]
    UnknownFormat(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
