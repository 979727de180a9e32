//! Topic multigraph construction and aggregation into the weighted network.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Course, Topic};
use crate::par;

/// Directed simple graph over topics with one value per ordered pair.
///
/// Nodes and edges are kept in lexicographic order, so every traversal is
/// deterministic. Self-loops are not representable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiGraph<W> {
    nodes: BTreeSet<Topic>,
    edges: BTreeMap<(Topic, Topic), W>,
}

/// Edge weight is the number of construction-time edges between the pair.
pub type TopicNetwork = DiGraph<u64>;

/// Edge value is a distance, normally `1 / weight`.
pub type DistanceNetwork = DiGraph<f64>;

impl<W> Default for DiGraph<W> {
    fn default() -> Self {
        DiGraph {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }
}

impl<W> DiGraph<W> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, topic: Topic) -> bool {
        self.nodes.insert(topic)
    }

    /// Inserts or replaces the edge `source -> target`, adding missing nodes.
    ///
    /// # Panics
    /// If `source == target`.
    pub fn insert_edge(&mut self, source: Topic, target: Topic, value: W) -> Option<W> {
        assert!(source != target, "self-loop on {source:?}");
        self.nodes.insert(source.clone());
        self.nodes.insert(target.clone());
        self.edges.insert((source, target), value)
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &Topic> + '_ {
        self.nodes.iter()
    }

    pub fn node_set(&self) -> &BTreeSet<Topic> {
        &self.nodes
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (&Topic, &Topic, &W)> + '_ {
        self.edges.iter().map(|((s, t), w)| (s, t, w))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, topic: &Topic) -> bool {
        self.nodes.contains(topic)
    }

    pub fn get(&self, source: &str, target: &str) -> Option<&W> {
        self.edges.get(&(Topic::from(source), Topic::from(target)))
    }

    pub fn map_values<X>(&self, mut f: impl FnMut(&W) -> X) -> DiGraph<X> {
        DiGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.iter().map(|(k, w)| (k.clone(), f(w))).collect(),
        }
    }

    /// Keeps edges satisfying `keep`; nodes are untouched.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(&Topic, &Topic, &W) -> bool) {
        self.edges.retain(|(s, t), w| keep(s, t, w));
    }

    /// Drops nodes with no incident edge.
    pub fn remove_isolated(&mut self) {
        let touched: BTreeSet<&Topic> = self.edges.keys().flat_map(|(s, t)| [s, t]).collect();
        let keep: BTreeSet<Topic> = touched.into_iter().cloned().collect();
        self.nodes = keep;
    }

    pub fn induced_subgraph(&self, keep: &BTreeSet<Topic>) -> Self
    where
        W: Clone,
    {
        DiGraph {
            nodes: self.nodes.intersection(keep).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|((s, t), _)| keep.contains(s) && keep.contains(t))
                .map(|(k, w)| (k.clone(), w.clone()))
                .collect(),
        }
    }

    /// Dense index view: node labels in sorted order and edges as index pairs,
    /// sorted by (source, target).
    pub fn indexed(&self) -> IndexedGraph<'_, W> {
        let labels: Vec<&Topic> = self.nodes.iter().collect();
        let position: BTreeMap<&Topic, usize> =
            labels.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|((s, t), w)| (position[s], position[t], w))
            .collect();
        IndexedGraph { labels, edges }
    }
}

impl DiGraph<u64> {
    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }
}

/// Borrowed integer-indexed view of a [`DiGraph`].
#[derive(Debug)]
pub struct IndexedGraph<'a, W> {
    pub labels: Vec<&'a Topic>,
    pub edges: Vec<(usize, usize, &'a W)>,
}

impl<W> IndexedGraph<'_, W> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for &(s, t, _) in &self.edges {
            adj[s].push(t);
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Co-occurrence inside one module (emitted in both directions).
    Intra,
    /// Flow from module `i` to module `i + 1`.
    Inter,
}

/// Where a multigraph edge came from. For inter edges `module` is the index
/// of the earlier module.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub course: String,
    pub module: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiEdge {
    pub source: Topic,
    pub target: Topic,
    pub provenance: Provenance,
}

/// Directed multigraph with one edge per construction event.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopicMultigraph {
    pub nodes: BTreeSet<Topic>,
    pub edges: Vec<MultiEdge>,
}

impl TopicMultigraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

fn course_edges(course: &Course) -> Vec<MultiEdge> {
    let mut edges = Vec::new();
    let edge = |s: &Topic, t: &Topic, module, kind| MultiEdge {
        source: s.clone(),
        target: t.clone(),
        provenance: Provenance {
            course: course.id.clone(),
            module,
            kind,
        },
    };
    for (i, module) in course.modules.iter().enumerate() {
        for a in module {
            for b in module {
                if a != b {
                    edges.push(edge(a, b, i, EdgeKind::Intra));
                }
            }
        }
        if let Some(next) = course.modules.get(i + 1) {
            for a in module {
                for b in next {
                    if a != b {
                        edges.push(edge(a, b, i, EdgeKind::Inter));
                    }
                }
            }
        }
    }
    edges
}

/// Builds the multigraph: every module becomes a bidirectional clique and
/// every topic of a module points at every topic of the next module in the
/// same course. A topic repeated in consecutive modules yields no self-loop.
pub fn build_multigraph(corpus: &Corpus) -> TopicMultigraph {
    let per_course = par::map_ordered(&corpus.courses, course_edges);
    TopicMultigraph {
        nodes: corpus.topics(),
        edges: per_course.into_iter().flatten().collect(),
    }
}

/// Collapses parallel edges into one edge weighted by multiplicity.
pub fn aggregate(mg: &TopicMultigraph) -> TopicNetwork {
    let mut edges: BTreeMap<(Topic, Topic), u64> = BTreeMap::new();
    for e in &mg.edges {
        *edges
            .entry((e.source.clone(), e.target.clone()))
            .or_insert(0) += 1;
    }
    DiGraph {
        nodes: mg.nodes.clone(),
        edges,
    }
}

/// `build_multigraph` followed by `aggregate`.
pub fn build_network(corpus: &Corpus) -> TopicNetwork {
    aggregate(&build_multigraph(corpus))
}
