//! Spanning trees over the distance network: the minimum spanning
//! arborescence (Chu-Liu/Edmonds) and a classic undirected MST (Kruskal).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::corpus::Topic;
use crate::par;
use crate::topicnet::DistanceNetwork;

/// Totals within this relative distance are treated as equal when picking
/// the best root.
const TOTAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: Topic,
    pub child: Topic,
    pub distance: f64,
}

/// Rooted spanning tree. Edges are sorted by (parent, child).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Backbone {
    pub root: Topic,
    pub edges: Vec<TreeEdge>,
    pub total_distance: f64,
}

impl Backbone {
    fn from_parents(labels: &[&Topic], root: usize, parents: &[(usize, usize, f64)]) -> Self {
        let mut edges: Vec<TreeEdge> = parents
            .iter()
            .map(|&(p, c, d)| TreeEdge {
                parent: labels[p].clone(),
                child: labels[c].clone(),
                distance: d,
            })
            .collect();
        edges.sort_by(|a, b| (&a.parent, &a.child).cmp(&(&b.parent, &b.child)));
        let total_distance = edges.iter().map(|e| e.distance).sum();
        Backbone {
            root: labels[root].clone(),
            edges,
            total_distance,
        }
    }

    pub fn nodes(&self) -> BTreeSet<Topic> {
        std::iter::once(self.root.clone())
            .chain(self.edges.iter().map(|e| e.child.clone()))
            .collect()
    }

    pub fn parent_of(&self, child: &Topic) -> Option<&Topic> {
        self.edges
            .iter()
            .find(|e| &e.child == child)
            .map(|e| &e.parent)
    }

    /// Tree depth of every node; the root has depth 0.
    pub fn depths(&self) -> BTreeMap<Topic, usize> {
        let mut children: BTreeMap<&Topic, Vec<&Topic>> = BTreeMap::new();
        for e in &self.edges {
            children.entry(&e.parent).or_default().push(&e.child);
        }
        let mut depth = BTreeMap::new();
        let mut queue = VecDeque::from([(&self.root, 0)]);
        while let Some((node, d)) = queue.pop_front() {
            if depth.insert(node.clone(), d).is_some() {
                continue;
            }
            for &c in children.get(node).into_iter().flatten() {
                queue.push_back((c, d + 1));
            }
        }
        depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeMode {
    #[default]
    Arborescence,
    Undirected,
}

impl fmt::Display for TreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeMode::Arborescence => "arborescence",
            TreeMode::Undirected => "undirected",
        })
    }
}

impl FromStr for TreeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "arborescence" => Ok(TreeMode::Arborescence),
            "undirected" => Ok(TreeMode::Undirected),
            other => Err(format!(
                "unknown tree mode {other:?} (expected arborescence or undirected)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    from: usize,
    to: usize,
    weight: f64,
}

/// Chu-Liu/Edmonds. Returns, for every non-root node, the index of its
/// incoming arc, or `None` when some node has no usable incoming arc.
///
/// Ties between equal-weight arcs go to the lower arc index.
fn edmonds(n: usize, root: usize, arcs: &[Arc]) -> Option<Vec<usize>> {
    const NONE: usize = usize::MAX;
    let mut best_in = vec![NONE; n];
    for (i, a) in arcs.iter().enumerate() {
        if a.to == root || a.from == a.to {
            continue;
        }
        if best_in[a.to] == NONE || a.weight < arcs[best_in[a.to]].weight {
            best_in[a.to] = i;
        }
    }
    if (0..n).any(|v| v != root && best_in[v] == NONE) {
        return None;
    }

    let mut component = vec![NONE; n];
    let mut walk = vec![NONE; n];
    let mut on_cycle = vec![false; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        let mut x = start;
        while x != root && walk[x] == NONE && component[x] == NONE {
            walk[x] = start;
            x = arcs[best_in[x]].from;
        }
        if x != root && walk[x] == start && component[x] == NONE {
            let mut cycle = Vec::new();
            let mut y = x;
            loop {
                component[y] = cycles.len();
                on_cycle[y] = true;
                cycle.push(y);
                y = arcs[best_in[y]].from;
                if y == x {
                    break;
                }
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Some((0..n).filter(|&v| v != root).map(|v| best_in[v]).collect());
    }

    let mut count = cycles.len();
    for c in component.iter_mut() {
        if *c == NONE {
            *c = count;
            count += 1;
        }
    }
    let mut contracted = Vec::new();
    let mut origin = Vec::new();
    for (i, a) in arcs.iter().enumerate() {
        let (cu, cv) = (component[a.from], component[a.to]);
        if cu == cv {
            continue;
        }
        let weight = if on_cycle[a.to] {
            a.weight - arcs[best_in[a.to]].weight
        } else {
            a.weight
        };
        contracted.push(Arc {
            from: cu,
            to: cv,
            weight,
        });
        origin.push(i);
    }
    let chosen = edmonds(count, component[root], &contracted)?;

    let mut incoming = vec![NONE; n];
    for j in chosen {
        let i = origin[j];
        incoming[arcs[i].to] = i;
    }
    for cycle in &cycles {
        for &v in cycle {
            if incoming[v] == NONE {
                incoming[v] = best_in[v];
            }
        }
    }
    Some((0..n).filter(|&v| v != root).map(|v| incoming[v]).collect())
}

fn reachable_from(adj: &[Vec<usize>], root: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

fn arborescence_at(labels: &[&Topic], arcs: &[Arc], root: usize) -> Option<Backbone> {
    let chosen = edmonds(labels.len(), root, arcs)?;
    let parents: Vec<(usize, usize, f64)> = chosen
        .into_iter()
        .map(|i| (arcs[i].from, arcs[i].to, arcs[i].weight))
        .collect();
    Some(Backbone::from_parents(labels, root, &parents))
}

fn cmp_total(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= TOTAL_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// Minimum spanning arborescence over directed distances.
///
/// With `root = None` every node is tried and the cheapest tree wins; equal
/// totals go to the lexicographically smallest root.
pub fn min_arborescence(
    net: &DistanceNetwork,
    root: Option<&Topic>,
) -> Result<Backbone, GraphError> {
    if net.is_empty() {
        return Err(GraphError::Empty("backbone"));
    }
    let view = net.indexed();
    let arcs: Vec<Arc> = view
        .edges
        .iter()
        .map(|&(from, to, &weight)| Arc { from, to, weight })
        .collect();
    let adj = view.out_adjacency();

    if let Some(root) = root {
        let r = view
            .labels
            .iter()
            .position(|t| *t == root)
            .ok_or_else(|| GraphError::UnknownRoot(root.to_string()))?;
        let seen = reachable_from(&adj, r);
        let unreachable: Vec<String> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| !s)
            .map(|(i, _)| view.labels[i].to_string())
            .collect();
        if !unreachable.is_empty() {
            return Err(GraphError::Unreachable {
                root: root.to_string(),
                nodes: unreachable,
            });
        }
        return Ok(arborescence_at(&view.labels, &arcs, r).expect("all nodes reachable"));
    }

    let roots: Vec<usize> = (0..view.len()).collect();
    let trees = par::map_ordered(&roots, |&r| {
        if reachable_from(&adj, r).iter().all(|&s| s) {
            arborescence_at(&view.labels, &arcs, r)
        } else {
            None
        }
    });
    let mut best: Option<Backbone> = None;
    for tree in trees.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some(b) => cmp_total(tree.total_distance, b.total_distance) == Ordering::Less,
        };
        if better {
            best = Some(tree);
        }
    }
    best.ok_or(GraphError::NoArborescence)
}

/// Default backbone: the minimum spanning arborescence.
pub fn backbone(net: &DistanceNetwork, root: Option<&Topic>) -> Result<Backbone, GraphError> {
    min_arborescence(net, root)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller index becomes the representative.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Kruskal MST on symmetrized distances (the smaller of the two directions
/// per pair). The tree is rooted at the smallest label and oriented away
/// from it.
pub fn undirected_mst(net: &DistanceNetwork) -> Result<Backbone, GraphError> {
    if net.is_empty() {
        return Err(GraphError::Empty("undirected_mst"));
    }
    let view = net.indexed();
    let n = view.len();
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(s, t, &d) in &view.edges {
        let key = (s.min(t), s.max(t));
        pairs.entry(key).and_modify(|e| *e = e.min(d)).or_insert(d);
    }
    let mut candidates: Vec<((usize, usize), f64)> = pairs.into_iter().collect();
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut sets = DisjointSets::new(n);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for ((u, v), d) in candidates {
        if sets.union(u, v) {
            adj[u].push((v, d));
            adj[v].push((u, d));
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for v in 0..n {
        let r = sets.find(v);
        groups
            .entry(r)
            .or_default()
            .push(view.labels[v].to_string());
    }
    if groups.len() > 1 {
        return Err(GraphError::Disconnected {
            components: groups.into_values().collect(),
        });
    }

    let mut parents = Vec::with_capacity(n - 1);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, d) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parents.push((u, v, d));
                queue.push_back(v);
            }
        }
    }
    Ok(Backbone::from_parents(&view.labels, 0, &parents))
}

/// Dispatches on [`TreeMode`]. `root` only applies to arborescences.
pub fn spanning_tree(
    net: &DistanceNetwork,
    mode: TreeMode,
    root: Option<&Topic>,
) -> Result<Backbone, GraphError> {
    match mode {
        TreeMode::Arborescence => min_arborescence(net, root),
        TreeMode::Undirected => undirected_mst(net),
    }
}
