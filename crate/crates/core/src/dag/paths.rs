//! Bridges and the path families used by the many-player learner.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::game::{EdgeId, Network, Path, VertexId};

use super::flow::disjoint_paths;

/// Edges on every `k`-`d` path, ordered along the paths.
pub fn find_bridges(net: &Network, k: VertexId) -> Vec<EdgeId> {
    let from_k = net.reachable_from(k, |_| false);
    let mut bridges: Vec<EdgeId> = net
        .edges()
        .iter()
        .filter(|e| from_k[e.tail])
        .filter(|e| !net.reachable_from(k, |x| x == e.id)[net.dest()])
        .map(|e| e.id)
        .collect();
    bridges.sort_by_key(|&e| net.position(net.edge(e).tail));
    bridges
}

/// Two paths from `from` to the destination whose common edges are
/// exactly `later` (bridges in path order), built by joining edge-disjoint
/// pairs between consecutive bridges.
pub fn bridge_pair(net: &Network, from: VertexId, later: &[EdgeId]) -> Result<(Path, Path)> {
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut at = from;
    let stops = later.iter().map(|&b| Some(b)).chain(std::iter::once(None));
    for stop in stops {
        let to = stop.map_or(net.dest(), |b| net.edge(b).tail);
        let pair = disjoint_paths(net, &[at, at], to, |_| false)
            .ok_or_else(|| Error::PathSelectionFailed(format!("no two edge-disjoint paths from {at} to {to}")))?;
        first.extend_from_slice(pair[0].edges());
        second.extend_from_slice(pair[1].edges());
        if let Some(b) = stop {
            first.push(b);
            second.push(b);
            at = net.edge(b).head;
        }
    }
    let (p, q) = (Path(first), Path(second));
    let a: BTreeSet<EdgeId> = p.edges().iter().copied().collect();
    let common: BTreeSet<EdgeId> = q.edges().iter().copied().filter(|e| a.contains(e)).collect();
    if common != later.iter().copied().collect() {
        return Err(Error::PathSelectionFailed(format!("paths {p} and {q} share more than the bridges")));
    }
    Ok((p, q))
}

/// `(p4, p5)` for bridge `bridges[j]`: paths from its head to the
/// destination that share exactly the later bridges.
pub fn choose_p4_p5(net: &Network, bridges: &[EdgeId], j: usize) -> Result<(Path, Path)> {
    bridge_pair(net, net.edge(bridges[j]).head, &bridges[j + 1..])
}

/// `(p1, p3)` for a bridge with tail `v`: an origin-`v` path and a
/// `k`-`v` path that are edge-disjoint, where `p1` does not enter `k`
/// through the last edge of `p2`.
///
/// Both come from one flow of two units into `v` with unit supplies at the
/// origin and at `k`, in the network without the last edge of `p2`.
pub fn choose_p1_p3(net: &Network, k: VertexId, v: VertexId, p2: &Path) -> Result<(Path, Path)> {
    let banned = p2.edges().last().copied();
    let paths = disjoint_paths(net, &[net.origin(), k], v, |e| Some(e) == banned)
        .ok_or_else(|| Error::PathSelectionFailed(format!("no disjoint origin-{v} and {k}-{v} paths")))?;
    let (p1, p3) = (paths[0].clone(), paths[1].clone());
    if p1.edges().iter().any(|&e| p3.contains(e)) {
        return Err(Error::PathSelectionFailed(format!("{p1} and {p3} overlap")));
    }
    Ok((p1, p3))
}
