//! Topic networks built from sequenced course syllabi.
//!
//! A [`corpus::Corpus`] is an ordered list of courses, each an ordered list of
//! modules, each a set of canonical topic labels. From it the crate builds a
//! directed multigraph of co-occurrence and sequence edges, aggregates it into a
//! weighted [`topicnet::TopicNetwork`], and runs the analyses in [`graphops`]:
//! edge-weight thresholding, the largest strongly connected component, Louvain
//! communities and a minimum spanning arborescence over inverted weights.
//! [`report`] covers frequency tables and graph serialization, and
//! [`pipeline`] strings everything together.

pub mod corpus;
pub mod graphops;
mod par;
pub mod pipeline;
pub mod report;
pub mod topicnet;

pub use corpus::{fold_label, Corpus, NormalizationRules, RawCorpus, Topic};
pub use graphops::{Backbone, CommunityPartition, GraphError};
pub use topicnet::{DiGraph, DistanceNetwork, TopicMultigraph, TopicNetwork};
