//! Analyses over the topic network: thresholding, strongly connected
//! components, Louvain communities, weight inversion and spanning trees.

mod communities;
mod filter;
mod scc;
mod tree;

use thiserror::Error;

pub use communities::{
    canonical_assignment, detect_communities, detect_communities_with, modularity,
    modularity_with_resolution, CommunityPartition, LouvainOptions, SymmetricGraph,
};
pub use filter::{invert_weights, threshold};
pub use scc::{largest_scc, strongly_connected_components};
pub use tree::{
    backbone, min_arborescence, spanning_tree, undirected_mst, Backbone, TreeEdge, TreeMode,
};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("{0}: the network has no nodes")]
    Empty(&'static str),
    #[error("node {0:?} is missing from the community assignment")]
    MissingNode(String),
    #[error("root {0:?} is not a node of the network")]
    UnknownRoot(String),
    #[error("no arborescence from root {root:?}; unreachable nodes: {}", nodes.join(", "))]
    Unreachable { root: String, nodes: Vec<String> },
    #[error("no node reaches every other node, so no spanning arborescence exists")]
    NoArborescence,
    #[error(
        "network is disconnected; components: {}",
        format_components(components)
    )]
    Disconnected { components: Vec<Vec<String>> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}
