//! Brute-force oracles and random generators shared by the integration tests.
//! Nothing here calls into the algorithms it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use currimap_core::corpus::{Corpus, NormalizationRules, RawCorpus, RawCourse};
use currimap_core::topicnet::{DistanceNetwork, TopicNetwork};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOPIC_POOL: &[&str] = &[
    "t00", "t01", "t02", "t03", "t04", "t05", "t06", "t07", "t08", "t09", "t10", "t11",
];

/// Random corpus: up to `max_courses` courses, each with up to `max_modules`
/// modules of up to `max_topics` topics drawn from [`TOPIC_POOL`].
pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    max_courses: usize,
    max_modules: usize,
    max_topics: usize,
) -> Corpus {
    let courses = rng.random_range(1..=max_courses);
    let raw = RawCorpus {
        courses: (0..courses)
            .map(|c| {
                let modules = rng.random_range(1..=max_modules);
                let modules: Vec<Vec<String>> = (0..modules)
                    .map(|_| {
                        let k = rng.random_range(1..=max_topics);
                        (0..k)
                            .map(|_| TOPIC_POOL[rng.random_range(0..TOPIC_POOL.len())].to_string())
                            .collect()
                    })
                    .collect();
                RawCourse::new(&format!("course-{c}"), modules)
            })
            .collect(),
    };
    raw.normalize(&NormalizationRules::empty()).unwrap()
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i:02}")).collect()
}

/// Random directed graph on `n` nodes with edge probability `p` and integer
/// weights in `1..=max_w`.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> TopicNetwork {
    let names = labels(n);
    let mut g = TopicNetwork::new();
    for name in &names {
        g.add_node(name.as_str().into());
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                g.insert_edge(
                    names[s].as_str().into(),
                    names[t].as_str().into(),
                    rng.random_range(1..=max_w),
                );
            }
        }
    }
    g
}

pub fn random_distance_network(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: f64,
    max_w: u64,
) -> DistanceNetwork {
    let g = random_network(rng, n, p, max_w);
    let mut d = DistanceNetwork::new();
    for node in g.nodes() {
        d.add_node(node.clone());
    }
    for (s, t, &w) in g.edges() {
        d.insert_edge(s.clone(), t.clone(), w as f64);
    }
    d
}

/// Edge weights by looping over every (module, module') pair where module'
/// is the same module or the next one.
pub fn naive_weights(corpus: &Corpus) -> BTreeMap<(String, String), u64> {
    let mut counts = BTreeMap::new();
    for course in &corpus.courses {
        let m = &course.modules;
        for i in 0..m.len() {
            for j in [i, i + 1] {
                if j >= m.len() {
                    continue;
                }
                for a in &m[i] {
                    for b in &m[j] {
                        if a != b {
                            *counts.entry((a.to_string(), b.to_string())).or_insert(0u64) += 1;
                        }
                    }
                }
            }
        }
    }
    counts
}

/// Closed-form multigraph edge count of one course.
pub fn closed_form_edges(modules: &[BTreeSet<currimap_core::Topic>]) -> usize {
    let intra: usize = modules.iter().map(|s| s.len() * (s.len() - 1)).sum();
    let inter: usize = modules
        .windows(2)
        .map(|w| w[0].len() * w[1].len() - w[0].intersection(&w[1]).count())
        .sum();
    intra + inter
}

/// Node labels and a boolean adjacency matrix.
pub fn adjacency<W>(g: &currimap_core::DiGraph<W>) -> (Vec<String>, Vec<Vec<bool>>) {
    let names: Vec<String> = g.nodes().map(|t| t.to_string()).collect();
    let pos: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut adj = vec![vec![false; names.len()]; names.len()];
    for (s, t, _) in g.edges() {
        adj[pos[s.as_str()]][pos[t.as_str()]] = true;
    }
    (names, adj)
}

/// Reflexive transitive closure by Floyd-Warshall.
pub fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Largest mutual-reachability class, ties to the one holding the smallest
/// label.
pub fn brute_largest_scc<W>(g: &currimap_core::DiGraph<W>) -> BTreeSet<String> {
    let (names, adj) = adjacency(g);
    let r = closure(&adj);
    let n = names.len();
    let mut best: Option<BTreeSet<String>> = None;
    for i in 0..n {
        let class: BTreeSet<String> = (0..n)
            .filter(|&j| r[i][j] && r[j][i])
            .map(|j| names[j].clone())
            .collect();
        let better = match &best {
            None => true,
            Some(b) => {
                class.len() > b.len() || (class.len() == b.len() && class.first() < b.first())
            }
        };
        if better {
            best = Some(class);
        }
    }
    best.unwrap_or_default()
}

/// Symmetrized adjacency matrix with zero diagonal.
pub fn symmetric_matrix(g: &TopicNetwork) -> (Vec<String>, Vec<Vec<f64>>) {
    let names: Vec<String> = g.nodes().map(|t| t.to_string()).collect();
    let pos: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut a = vec![vec![0.0; names.len()]; names.len()];
    for (s, t, &w) in g.edges() {
        let (i, j) = (pos[s.as_str()], pos[t.as_str()]);
        a[i][j] += w as f64;
        a[j][i] += w as f64;
    }
    (names, a)
}

/// Newman-Girvan Q by direct double summation over node pairs.
pub fn q_direct(a: &[Vec<f64>], membership: &[usize]) -> f64 {
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] == membership[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut prefix = vec![0];
    grow(&mut prefix, 0, n, &mut out);
    out
}

/// Best Q over all partitions.
pub fn exhaustive_max_q(a: &[Vec<f64>]) -> f64 {
    set_partitions(a.len())
        .iter()
        .map(|p| q_direct(a, p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum total over all parent maps rooted at `root` that form a tree.
/// `dist[u][v]` is the distance of `u -> v` or `None`.
pub fn brute_arborescence(dist: &[Vec<Option<f64>>], root: usize) -> Option<f64> {
    let n = dist.len();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut best: Option<f64> = None;
    let mut parent = vec![usize::MAX; n];
    fn rec(
        idx: usize,
        others: &[usize],
        dist: &[Vec<Option<f64>>],
        root: usize,
        parent: &mut Vec<usize>,
        best: &mut Option<f64>,
    ) {
        let n = dist.len();
        if idx == others.len() {
            // Every node must reach the root by following parents.
            for &v in others {
                let mut x = v;
                let mut steps = 0;
                while x != root {
                    x = parent[x];
                    steps += 1;
                    if steps > n {
                        return;
                    }
                }
            }
            let total: f64 = others.iter().map(|&v| dist[parent[v]][v].unwrap()).sum();
            if best.is_none_or(|b| total < b) {
                *best = Some(total);
            }
            return;
        }
        let v = others[idx];
        for u in 0..n {
            if u != v && dist[u][v].is_some() {
                parent[v] = u;
                rec(idx + 1, others, dist, root, parent, best);
            }
        }
    }
    rec(0, &others, dist, root, &mut parent, &mut best);
    best
}

pub fn distance_matrix(g: &DistanceNetwork) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let names: Vec<String> = g.nodes().map(|t| t.to_string()).collect();
    let pos: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut d = vec![vec![None; names.len()]; names.len()];
    for (s, t, &w) in g.edges() {
        d[pos[s.as_str()]][pos[t.as_str()]] = Some(w);
    }
    (names, d)
}

/// Minimum total over all spanning trees of the symmetrized graph, by
/// checking every (n-1)-subset of candidate pairs.
pub fn brute_undirected_mst(g: &DistanceNetwork) -> Option<f64> {
    let (names, d) = distance_matrix(g);
    let n = names.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = match (d[i][j], d[j][i]) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            if let Some(w) = w {
                pairs.push((i, j, w));
            }
        }
    }
    let need = n.saturating_sub(1);
    let mut best = None;
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let mut comp: Vec<usize> = (0..n).collect();
        let find = |comp: &mut Vec<usize>, mut x: usize| {
            while comp[x] != x {
                x = comp[x];
            }
            x
        };
        let mut total = 0.0;
        let mut ok = true;
        for (bit, &(i, j, w)) in pairs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                if a == b {
                    ok = false;
                    break;
                }
                comp[a] = b;
                total += w;
            }
        }
        if ok && best.is_none_or(|b| total < b) {
            best = Some(total);
        }
    }
    best
}

/// First single-node reassignment (to a neighbor's community) that raises Q,
/// as `(node, new_community)`.
pub fn improving_move(a: &[Vec<f64>], membership: &[usize]) -> Option<(usize, usize)> {
    let q = q_direct(a, membership);
    for i in 0..a.len() {
        let targets: BTreeSet<usize> = (0..a.len())
            .filter(|&j| a[i][j] > 0.0 && membership[j] != membership[i])
            .map(|j| membership[j])
            .collect();
        for c in targets {
            let mut moved = membership.to_vec();
            moved[i] = c;
            if q_direct(a, &moved) > q + 1e-12 {
                return Some((i, c));
            }
        }
    }
    None
}
