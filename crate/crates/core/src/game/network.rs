use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// A sequence of edge ids. As a pure strategy it is an o-d path; the
/// learners also use it for partial paths between inner vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<EdgeId>);

impl Path {
    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    /// Concatenation of several path pieces.
    pub fn join<'a>(pieces: impl IntoIterator<Item = &'a Path>) -> Path {
        Path(pieces.into_iter().flat_map(|p| p.0.iter().copied()).collect())
    }
}

impl From<Vec<EdgeId>> for Path {
    fn from(v: Vec<EdgeId>) -> Self {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl std::str::FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "()" || s.is_empty() {
            return Ok(Path::default());
        }
        s.split(['·', '.', '-'])
            .map(|t| t.trim().parse::<EdgeId>().map_err(|_| Error::Parse(format!("bad edge id {t:?} in path {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }
}

/// Directed acyclic multigraph with a distinguished origin and destination.
/// Edge ids are `0..num_edges` and stable, so parallel edges stay distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    num_vertices: usize,
    edges: Vec<Edge>,
    origin: VertexId,
    dest: VertexId,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    topo: Vec<VertexId>,
    position: Vec<usize>,
}

impl Network {
    pub fn new(num_vertices: usize, arcs: &[(VertexId, VertexId)], origin: VertexId, dest: VertexId) -> Result<Self> {
        if origin == dest {
            return Err(Error::InvalidGame("origin and destination must differ".into()));
        }
        if origin >= num_vertices || dest >= num_vertices {
            return Err(Error::InvalidGame("origin or destination out of range".into()));
        }
        let mut out_edges = vec![Vec::new(); num_vertices];
        let mut in_edges = vec![Vec::new(); num_vertices];
        let mut edges = Vec::with_capacity(arcs.len());
        for (id, &(tail, head)) in arcs.iter().enumerate() {
            if tail >= num_vertices || head >= num_vertices {
                return Err(Error::InvalidGame(format!("edge {id} has an endpoint out of range")));
            }
            edges.push(Edge { id, tail, head });
            out_edges[tail].push(id);
            in_edges[head].push(id);
        }
        let topo = kahn_order(num_vertices, &edges, &out_edges)?;
        let mut position = vec![0; num_vertices];
        for (i, &v) in topo.iter().enumerate() {
            position[v] = i;
        }
        Ok(Self { num_vertices, edges, origin, dest, out_edges, in_edges, topo, position })
    }

    /// `m` parallel links from vertex 0 to vertex 1; link `i` is edge `i`.
    pub fn parallel_links(m: usize) -> Self {
        Self::new(2, &vec![(0, 1); m], 0, 1).expect("two-vertex network is acyclic")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn arcs(&self) -> Vec<(VertexId, VertexId)> {
        self.edges.iter().map(|e| (e.tail, e.head)).collect()
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn dest(&self) -> VertexId {
        self.dest
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    /// Topological order, ties broken by smallest vertex id.
    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    /// Rank of `v` in [`Self::topological_order`].
    pub fn position(&self, v: VertexId) -> usize {
        self.position[v]
    }

    pub fn is_parallel_links(&self) -> bool {
        self.num_vertices == 2 && self.edges.iter().all(|e| e.tail == self.origin && e.head == self.dest)
    }

    /// Vertices reachable from `start` without using edges for which `banned` holds.
    pub fn reachable_from(&self, start: VertexId, banned: impl Fn(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.out_edges[v] {
                let h = self.edges[e].head;
                if !banned(e) && !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// Vertices from which `target` is reachable without banned edges.
    pub fn reaching(&self, target: VertexId, banned: impl Fn(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.in_edges[v] {
                let t = self.edges[e].tail;
                if !banned(e) && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Vertices that lie on no o-d path.
    pub fn dead_vertices(&self) -> Vec<VertexId> {
        let fwd = self.reachable_from(self.origin, |_| false);
        let bwd = self.reaching(self.dest, |_| false);
        (0..self.num_vertices).filter(|&v| !(fwd[v] && bwd[v])).collect()
    }

    /// Removes every vertex (and incident edge) that lies on no o-d path.
    /// Returns the pruned network and, for each new edge id, its old id.
    pub fn pruned(&self) -> Result<(Network, Vec<EdgeId>)> {
        let dead = self.dead_vertices();
        if dead.contains(&self.origin) {
            return Err(Error::InvalidGame("destination unreachable from origin".into()));
        }
        let mut alive = vec![true; self.num_vertices];
        for v in dead {
            alive[v] = false;
        }
        let mut renumber = vec![usize::MAX; self.num_vertices];
        let mut next = 0;
        for v in 0..self.num_vertices {
            if alive[v] {
                renumber[v] = next;
                next += 1;
            }
        }
        let mut arcs = Vec::new();
        let mut old_ids = Vec::new();
        for e in &self.edges {
            if alive[e.tail] && alive[e.head] {
                arcs.push((renumber[e.tail], renumber[e.head]));
                old_ids.push(e.id);
            }
        }
        let net = Network::new(next, &arcs, renumber[self.origin], renumber[self.dest])?;
        Ok((net, old_ids))
    }

    /// Whether `path` is a connected walk from `from` to `to`.
    pub fn connects(&self, path: &Path, from: VertexId, to: VertexId) -> bool {
        let mut at = from;
        for &e in path.edges() {
            if e >= self.edges.len() || self.edges[e].tail != at {
                return false;
            }
            at = self.edges[e].head;
        }
        at == to
    }

    pub fn check_strategy(&self, path: &Path) -> Result<()> {
        if self.connects(path, self.origin, self.dest) {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!("{path} is not an o-d path")))
        }
    }

    /// Every o-d path, in lexicographic order of edge-id sequences.
    pub fn enumerate_paths(&self) -> Vec<Path> {
        let useful = self.reaching(self.dest, |_| false);
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.dfs_paths(self.origin, &useful, &mut current, &mut out);
        out
    }

    fn dfs_paths(&self, v: VertexId, useful: &[bool], current: &mut Vec<EdgeId>, out: &mut Vec<Path>) {
        if v == self.dest {
            out.push(Path(current.clone()));
            return;
        }
        let mut outs = self.out_edges[v].clone();
        outs.sort_unstable();
        for e in outs {
            let h = self.edges[e].head;
            if useful[h] {
                current.push(e);
                self.dfs_paths(h, useful, current, out);
                current.pop();
            }
        }
    }

    /// Number of o-d paths (saturating).
    pub fn count_paths(&self) -> u128 {
        let mut ways = vec![0u128; self.num_vertices];
        ways[self.dest] = 1;
        for &v in self.topo.iter().rev() {
            if v == self.dest {
                continue;
            }
            ways[v] = self.out_edges[v].iter().fold(0u128, |acc, &e| acc.saturating_add(ways[self.edges[e].head]));
        }
        ways[self.origin]
    }

    /// Lexicographically least `from`-`to` path avoiding banned edges.
    pub fn least_path(&self, from: VertexId, to: VertexId, banned: impl Fn(EdgeId) -> bool) -> Option<Path> {
        let can_reach = self.reaching(to, &banned);
        if !can_reach[from] {
            return None;
        }
        let mut path = Vec::new();
        let mut at = from;
        while at != to {
            let next =
                self.out_edges[at].iter().copied().filter(|&e| !banned(e) && can_reach[self.edges[e].head]).min()?;
            path.push(next);
            at = self.edges[next].head;
        }
        Some(Path(path))
    }
}

fn kahn_order(n: usize, edges: &[Edge], out_edges: &[Vec<EdgeId>]) -> Result<Vec<VertexId>> {
    let mut indeg = vec![0usize; n];
    for e in edges {
        indeg[e.head] += 1;
    }
    let mut ready: BinaryHeap<Reverse<VertexId>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &e in &out_edges[v] {
            let h = edges[e].head;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(Reverse(h));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(Error::NotADag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// o=0, m=1, d=2; a,b: o→m; c,d: m→d
    pub(crate) fn diamond() -> Network {
        Network::new(3, &[(0, 1), (0, 1), (1, 2), (1, 2)], 0, 2).unwrap()
    }

    #[test]
    fn diamond_paths_and_order() {
        let net = diamond();
        let paths: Vec<String> = net.enumerate_paths().iter().map(|p| p.to_string()).collect();
        assert_eq!(paths, ["0·2", "0·3", "1·2", "1·3"]);
        assert_eq!(net.topological_order(), &[0, 1, 2]);
        assert_eq!(net.count_paths(), 4);
    }

    #[test]
    fn single_edge_and_chain_with_shortcut() {
        let one = Network::new(2, &[(0, 1)], 0, 1).unwrap();
        assert_eq!(one.enumerate_paths(), vec![Path(vec![0])]);
        // o=0 → x=1 → d=2 plus o → d
        let net = Network::new(3, &[(0, 1), (1, 2), (0, 2)], 0, 2).unwrap();
        assert_eq!(net.enumerate_paths(), vec![Path(vec![0, 1]), Path(vec![2])]);
    }

    #[test]
    fn rejects_cycles_and_degenerate_endpoints() {
        assert_eq!(Network::new(2, &[(0, 1), (1, 0)], 0, 1), Err(Error::NotADag));
        assert!(Network::new(1, &[], 0, 0).is_err());
    }

    #[test]
    fn topological_tie_break_is_by_vertex_id() {
        // o=0 → {1,2} → d=3: both 0,1,2,3 and 0,2,1,3 are valid
        let net = Network::new(4, &[(0, 2), (0, 1), (1, 3), (2, 3)], 0, 3).unwrap();
        let order = net.topological_order();
        assert_eq!(order, &[0, 1, 2, 3]);
        for e in net.edges() {
            assert!(net.position(e.tail) < net.position(e.head));
        }
    }

    #[test]
    fn pruning_and_path_checks() {
        // vertex 3 hangs off o and never reaches d
        let net = Network::new(4, &[(0, 1), (1, 2), (0, 3)], 0, 2).unwrap();
        assert_eq!(net.dead_vertices(), vec![3]);
        let (pruned, old) = net.pruned().unwrap();
        assert_eq!(pruned.num_vertices(), 3);
        assert_eq!(old, vec![0, 1]);
        assert!(net.check_strategy(&Path(vec![0, 1])).is_ok());
        assert!(net.check_strategy(&Path(vec![1])).is_err());
        assert_eq!(net.least_path(0, 2, |e| e == 0), None);
    }

    #[test]
    fn path_text_round_trip() {
        let p: Path = "3·1·4".parse().unwrap();
        assert_eq!(p, Path(vec![3, 1, 4]));
        assert_eq!(p.to_string().parse::<Path>().unwrap(), p);
        assert_eq!("()".parse::<Path>().unwrap(), Path::default());
    }
}
