use std::collections::BTreeSet;

use crate::corpus::Topic;
use crate::topicnet::{DistanceNetwork, TopicNetwork};

/// Keeps edges with `weight >= min_weight`.
///
/// Nodes that lose every incident edge are dropped; nodes that had none to
/// begin with are kept, so `min_weight = 1` is the identity.
pub fn threshold(net: &TopicNetwork, min_weight: u64) -> TopicNetwork {
    let mut out = net.clone();
    let mut orphaned: BTreeSet<Topic> = BTreeSet::new();
    out.retain_edges(|s, t, &w| {
        if w >= min_weight {
            true
        } else {
            orphaned.insert(s.clone());
            orphaned.insert(t.clone());
            false
        }
    });
    for (s, t, _) in out.edges() {
        orphaned.remove(s);
        orphaned.remove(t);
    }
    if orphaned.is_empty() {
        return out;
    }
    let keep: BTreeSet<Topic> = out
        .nodes()
        .filter(|n| !orphaned.contains(*n))
        .cloned()
        .collect();
    out.induced_subgraph(&keep)
}

/// Maps each weight `w` to the distance `1 / w`.
pub fn invert_weights(net: &TopicNetwork) -> DistanceNetwork {
    net.map_values(|&w| {
        debug_assert!(w >= 1);
        1.0 / w as f64
    })
}
