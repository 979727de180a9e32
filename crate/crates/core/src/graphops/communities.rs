//! Louvain modularity maximization on the symmetrized topic network.
//!
//! The directed network is turned into an undirected one with
//! `w{u,v} = w(u,v) + w(v,u)`, and partitions are scored with
//! `Q = sum_c [ in_c / 2m - gamma * (tot_c / 2m)^2 ]`, where `in_c` sums the
//! symmetric adjacency over ordered pairs inside `c` and `tot_c` sums the
//! strengths of its members.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::corpus::Topic;
use crate::par;
use crate::topicnet::TopicNetwork;

/// Minimum gain for a move to count as an improvement.
const GAIN_EPSILON: f64 = 1e-10;

/// Undirected weighted graph in adjacency-list form, nodes `0..n`.
///
/// `self_weight[u]` is the diagonal entry `A_uu`; it only appears after
/// aggregation.
#[derive(Debug, Clone)]
pub struct SymmetricGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    strength: Vec<f64>,
    total: f64,
}

impl SymmetricGraph {
    /// Builds from `(u, v, w)` triples; weights of both orientations add up.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut merged: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut self_weight = vec![0.0; n];
        for (u, v, w) in edges {
            if u == v {
                self_weight[u] += w;
            } else {
                *merged[u].entry(v).or_insert(0.0) += w;
                *merged[v].entry(u).or_insert(0.0) += w;
            }
        }
        let adjacency: Vec<Vec<(usize, f64)>> = merged
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let strength: Vec<f64> = adjacency
            .iter()
            .zip(&self_weight)
            .map(|(nbrs, s)| s + nbrs.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        let total = strength.iter().sum();
        SymmetricGraph {
            adjacency,
            self_weight,
            strength,
            total,
        }
    }

    /// Symmetrized view of a topic network, nodes in label order.
    pub fn from_network(net: &TopicNetwork) -> Self {
        let view = net.indexed();
        Self::from_edges(
            view.len(),
            view.edges.iter().map(|&(s, t, &w)| (s, t, w as f64)),
        )
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Symmetric weight between two distinct nodes.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adjacency[u]
            .iter()
            .find(|&&(x, _)| x == v)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    /// `2m`, the sum of all strengths.
    pub fn total_strength(&self) -> f64 {
        self.total
    }

    /// Modularity of `membership` at resolution `gamma`. Zero for a graph
    /// without edges.
    pub fn modularity(&self, membership: &[usize], gamma: f64) -> f64 {
        if self.total <= 0.0 {
            return 0.0;
        }
        let k = membership.iter().copied().max().map_or(0, |m| m + 1);
        let mut internal = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for u in 0..self.len() {
            let c = membership[u];
            tot[c] += self.strength[u];
            internal[c] += self.self_weight[u];
            for &(v, w) in &self.adjacency[u] {
                if membership[v] == c {
                    internal[c] += w;
                }
            }
        }
        let two_m = self.total;
        internal
            .iter()
            .zip(&tot)
            .map(|(i, t)| i / two_m - gamma * (t / two_m) * (t / two_m))
            .sum()
    }

    /// Repeated single-node moves in a shuffled order until a full pass
    /// makes no move. Returns whether anything moved.
    fn local_moves(&self, membership: &mut [usize], gamma: f64, rng: &mut ChaCha8Rng) -> bool {
        let n = self.len();
        let two_m = self.total;
        if two_m <= 0.0 {
            return false;
        }
        let mut tot = vec![0.0; n];
        for u in 0..n {
            tot[membership[u]] += self.strength[u];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut links = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &u in &order {
                let current = membership[u];
                let k_u = self.strength[u];
                for &(v, w) in &self.adjacency[u] {
                    let c = membership[v];
                    if links[c] == 0.0 {
                        touched.push(c);
                    }
                    links[c] += w;
                }
                tot[current] -= k_u;
                let gain =
                    |c: usize, links: &[f64], tot: &[f64]| links[c] - gamma * tot[c] * k_u / two_m;
                let stay = gain(current, &links, &tot);
                let mut best = current;
                let mut best_gain = stay;
                for &c in &touched {
                    let g = gain(c, &links, &tot);
                    if g > best_gain || (g == best_gain && c < best && c != current) {
                        best = c;
                        best_gain = g;
                    }
                }
                if best != current && best_gain - stay > GAIN_EPSILON {
                    membership[u] = best;
                    moved = true;
                } else {
                    best = current;
                }
                tot[best] += k_u;
                for &c in &touched {
                    links[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        moved_any
    }

    /// Collapses each community into one node.
    fn aggregate(&self, membership: &[usize], k: usize) -> SymmetricGraph {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            let cu = membership[u];
            if self.self_weight[u] != 0.0 {
                edges.push((cu, cu, self.self_weight[u]));
            }
            for &(v, w) in &self.adjacency[u] {
                let cv = membership[v];
                if cu == cv {
                    // Both orientations are visited, matching A_CC.
                    edges.push((cu, cu, w));
                } else if u < v {
                    edges.push((cu, cv, w));
                }
            }
        }
        SymmetricGraph::from_edges(k, edges)
    }

    /// One Louvain run from the singleton partition, followed by node-level
    /// refinement so the result is stable under single-node moves.
    fn louvain(&self, gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.len();
        let mut membership: Vec<usize> = (0..n).collect();
        let mut level = self.clone();
        loop {
            let mut local: Vec<usize> = (0..level.len()).collect();
            if !level.local_moves(&mut local, gamma, rng) {
                break;
            }
            let (local, k) = renumber(&local);
            for m in membership.iter_mut() {
                *m = local[*m];
            }
            if k == level.len() {
                break;
            }
            level = level.aggregate(&local, k);
        }
        self.local_moves(&mut membership, gamma, rng);
        canonical_assignment(&membership)
    }
}

/// Relabels communities densely in order of first appearance.
fn renumber(membership: &[usize]) -> (Vec<usize>, usize) {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(membership.len());
    for &m in membership {
        let next = map.len();
        out.push(*map.entry(m).or_insert(next));
    }
    (out, map.len())
}

/// Canonical form of a partition: communities numbered from 0 in order of
/// their first member.
pub fn canonical_assignment(membership: &[usize]) -> Vec<usize> {
    renumber(membership).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LouvainOptions {
    pub seed: u64,
    pub resolution: f64,
    pub restarts: usize,
}

impl Default for LouvainOptions {
    fn default() -> Self {
        LouvainOptions {
            seed: 0,
            resolution: 1.0,
            restarts: 8,
        }
    }
}

/// Community id per topic plus the standard (resolution 1) modularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    pub assignment: BTreeMap<Topic, usize>,
    pub modularity: f64,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment.values().copied().max().map_or(0, |m| m + 1)
    }

    /// Members of each community, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<Topic>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (topic, &c) in &self.assignment {
            out[c].push(topic.clone());
        }
        out
    }
}

/// Louvain with default restarts.
pub fn detect_communities(
    net: &TopicNetwork,
    seed: u64,
    resolution: f64,
) -> Result<CommunityPartition, GraphError> {
    detect_communities_with(
        net,
        &LouvainOptions {
            seed,
            resolution,
            ..LouvainOptions::default()
        },
    )
}

/// Runs `restarts` seeded Louvain passes and keeps the best objective.
///
/// Restart `r` draws its visit orders from ChaCha8 seeded with `seed` on
/// stream `r`. Ties on the objective go to the lexicographically smallest
/// canonical assignment, so the result does not depend on thread count.
pub fn detect_communities_with(
    net: &TopicNetwork,
    options: &LouvainOptions,
) -> Result<CommunityPartition, GraphError> {
    if net.is_empty() {
        return Err(GraphError::Empty("detect_communities"));
    }
    if !(options.resolution > 0.0 && options.resolution.is_finite()) {
        return Err(GraphError::InvalidParameter(format!(
            "resolution must be positive, got {}",
            options.resolution
        )));
    }
    if options.restarts == 0 {
        return Err(GraphError::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    let graph = SymmetricGraph::from_network(net);
    let runs: Vec<u64> = (0..options.restarts as u64).collect();
    let results = par::map_ordered(&runs, |&r| {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(r);
        let membership = graph.louvain(options.resolution, &mut rng);
        let score = graph.modularity(&membership, options.resolution);
        (score, membership)
    });
    let (_, best) = results
        .into_iter()
        .reduce(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let modularity = graph.modularity(&best, 1.0);
    let view = net.indexed();
    let assignment = view
        .labels
        .iter()
        .zip(&best)
        .map(|(t, &c)| ((*t).clone(), c))
        .collect();
    Ok(CommunityPartition {
        assignment,
        modularity,
    })
}

/// Standard modularity of an assignment on the symmetrized network.
pub fn modularity(
    net: &TopicNetwork,
    assignment: &BTreeMap<Topic, usize>,
) -> Result<f64, GraphError> {
    modularity_with_resolution(net, assignment, 1.0)
}

pub fn modularity_with_resolution(
    net: &TopicNetwork,
    assignment: &BTreeMap<Topic, usize>,
    resolution: f64,
) -> Result<f64, GraphError> {
    let membership = net
        .nodes()
        .map(|t| {
            assignment
                .get(t)
                .copied()
                .ok_or_else(|| GraphError::MissingNode(t.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let membership = canonical_assignment(&membership);
    Ok(SymmetricGraph::from_network(net).modularity(&membership, resolution))
}
