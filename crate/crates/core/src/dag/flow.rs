//! Unit-capacity max-flow for edge-disjoint path selection.

use std::collections::VecDeque;

use crate::game::{EdgeId, Network, Path, VertexId};

/// Edge-disjoint paths, one starting at each entry of `sources` (repeats
/// allowed), all ending at `target`, avoiding banned edges. Paths come back
/// in the order of `sources`. `None` if no such family exists.
///
/// Augmenting paths are found by breadth-first search over the residual
/// graph, scanning edges by id, so the result is deterministic.
pub fn disjoint_paths(
    net: &Network,
    sources: &[VertexId],
    target: VertexId,
    banned: impl Fn(EdgeId) -> bool,
) -> Option<Vec<Path>> {
    let mut flow = vec![false; net.num_edges()];
    let mut supply = vec![0usize; net.num_vertices()];
    for &s in sources {
        supply[s] += 1;
    }
    let mut used = vec![0usize; net.num_vertices()];
    let mut starts: Vec<VertexId> = Vec::new();
    for &s in sources {
        if !starts.contains(&s) {
            starts.push(s);
        }
    }

    for _ in 0..sources.len() {
        let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; net.num_vertices()];
        let mut origin_of = vec![usize::MAX; net.num_vertices()];
        let mut seen = vec![false; net.num_vertices()];
        let mut queue = VecDeque::new();
        for &s in &starts {
            if used[s] < supply[s] && !seen[s] {
                seen[s] = true;
                origin_of[s] = s;
                queue.push_back(s);
            }
        }
        let mut reached = seen[target];
        while let Some(w) = queue.pop_front() {
            if reached {
                break;
            }
            let mut moves: Vec<(EdgeId, VertexId, bool)> = Vec::new();
            for &e in net.out_edges(w) {
                if !flow[e] && !banned(e) {
                    moves.push((e, net.edge(e).head, true));
                }
            }
            for &e in net.in_edges(w) {
                if flow[e] {
                    moves.push((e, net.edge(e).tail, false));
                }
            }
            moves.sort_by_key(|m| m.0);
            for (e, x, forward) in moves {
                if !seen[x] {
                    seen[x] = true;
                    parent[x] = Some((e, forward));
                    origin_of[x] = origin_of[w];
                    if x == target {
                        reached = true;
                        break;
                    }
                    queue.push_back(x);
                }
            }
        }
        if !reached {
            return None;
        }
        let mut at = target;
        while let Some((e, forward)) = parent[at] {
            flow[e] = forward;
            at = if forward { net.edge(e).tail } else { net.edge(e).head };
        }
        used[origin_of[target]] += 1;
    }

    let mut taken = vec![false; net.num_edges()];
    let mut paths = Vec::with_capacity(sources.len());
    for &s in sources {
        let mut at = s;
        let mut path = Vec::new();
        while at != target {
            let e = net.out_edges(at).iter().copied().filter(|&e| flow[e] && !taken[e]).min()?;
            taken[e] = true;
            path.push(e);
            at = net.edge(e).head;
        }
        paths.push(Path(path));
    }
    Some(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_has_two_disjoint_paths() {
        let net = Network::new(3, &[(0, 1), (0, 1), (1, 2), (1, 2)], 0, 2).unwrap();
        let p = disjoint_paths(&net, &[0, 0], 2, |_| false).unwrap();
        assert_eq!(p, vec![Path(vec![0, 2]), Path(vec![1, 3])]);
        assert!(disjoint_paths(&net, &[0, 0, 0], 2, |_| false).is_none());
    }

    #[test]
    fn needs_rerouting() {
        // o=0, a=1, b=2, d=3; the greedy path 0-1-2-3 blocks a second path
        let net = Network::new(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)], 0, 3).unwrap();
        let p = disjoint_paths(&net, &[0, 0], 3, |_| false).unwrap();
        let mut all: Vec<EdgeId> = p.iter().flat_map(|x| x.0.clone()).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), p[0].len() + p[1].len());
        for path in &p {
            assert!(net.connects(path, 0, 3));
        }
    }

    #[test]
    fn distinct_sources_and_empty_paths() {
        let net = Network::new(3, &[(0, 1), (1, 2), (0, 2)], 0, 2).unwrap();
        let p = disjoint_paths(&net, &[0, 1], 2, |_| false).unwrap();
        assert!(net.connects(&p[0], 0, 2) && net.connects(&p[1], 1, 2));
        assert!(p[0].edges().iter().all(|e| !p[1].contains(*e)));
        let same = disjoint_paths(&net, &[2, 2], 2, |_| false).unwrap();
        assert!(same.iter().all(Path::is_empty));
        assert!(disjoint_paths(&net, &[0, 0], 2, |e| e == 2).is_none());
    }
}
