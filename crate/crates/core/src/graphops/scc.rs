use std::collections::BTreeSet;

use super::GraphError;
use crate::corpus::Topic;
use crate::topicnet::DiGraph;

/// Iterative Tarjan over a dense adjacency list.
///
/// Components come out in reverse topological order; members of each
/// component are sorted ascending.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;
    // (node, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        call.push((start, 0));
        index[start] = next;
        low[start] = next;
        next += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// All strongly connected components, largest first; equal sizes are ordered
/// by their smallest member label.
pub fn strongly_connected_components<W>(net: &DiGraph<W>) -> Vec<BTreeSet<Topic>> {
    let view = net.indexed();
    let mut components = tarjan(&view.out_adjacency());
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
        .into_iter()
        .map(|c| c.into_iter().map(|i| view.labels[i].clone()).collect())
        .collect()
}

/// Induced subgraph on the largest strongly connected component.
///
/// Among components of equal size the one holding the lexicographically
/// smallest label wins.
pub fn largest_scc<W: Clone>(net: &DiGraph<W>) -> Result<DiGraph<W>, GraphError> {
    if net.is_empty() {
        return Err(GraphError::Empty("largest_scc"));
    }
    let best = strongly_connected_components(net)
        .into_iter()
        .next()
        .expect("nonempty graph has a component");
    Ok(net.induced_subgraph(&best))
}
