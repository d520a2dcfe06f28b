//! Removal of dependent edge pairs by contraction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{CongestionGame, EdgeId, LoadAssignment, Network, Path, StrategyProfile, VertexId};
use crate::oracle::CongestionQueries;
use crate::scalar::Scalar;

/// Whether edges `e` and `f` lie on exactly the same origin-destination
/// paths. Edges leaving the same vertex are never dependent.
pub fn dependent(net: &Network, e: EdgeId, f: EdgeId) -> bool {
    let (mut a, mut b) = (net.edge(e), net.edge(f));
    if a.tail == b.tail {
        return false;
    }
    if net.position(a.tail) > net.position(b.tail) {
        std::mem::swap(&mut a, &mut b);
    }
    // every path through b uses a, and every path through a uses b
    !net.reachable_from(net.origin(), |x| x == a.id)[b.tail] && !net.reachable_from(a.head, |x| x == b.id)[net.dest()]
}

/// First dependent pair `(earlier, later)` in edge-id order, if any.
pub fn find_dependent_pair(net: &Network) -> Option<(EdgeId, EdgeId)> {
    for e in 0..net.num_edges() {
        for f in e + 1..net.num_edges() {
            if dependent(net, e, f) {
                let (te, tf) = (net.edge(e).tail, net.edge(f).tail);
                return Some(if net.position(te) < net.position(tf) { (e, f) } else { (f, e) });
            }
        }
    }
    None
}

/// Correspondence between a game and its contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMap {
    original: Network,
    contracted: Network,
    /// Original id of each contracted edge.
    original_edge: Vec<EdgeId>,
    /// Original edges whose costs each contracted edge carries, itself first.
    absorbed: Vec<Vec<EdgeId>>,
    /// Contracted id of each surviving original edge.
    contracted_edge: Vec<Option<EdgeId>>,
    /// For each removed original vertex, its only original out-edge.
    exit: Vec<Option<EdgeId>>,
}

impl ContractionMap {
    pub fn original(&self) -> &Network {
        &self.original
    }

    pub fn contracted(&self) -> &Network {
        &self.contracted
    }

    pub fn original_edge(&self, e: EdgeId) -> EdgeId {
        self.original_edge[e]
    }

    pub fn absorbed(&self, e: EdgeId) -> &[EdgeId] {
        &self.absorbed[e]
    }

    pub fn contracted_edge(&self, original: EdgeId) -> Option<EdgeId> {
        self.contracted_edge[original]
    }

    pub fn removed_edges(&self) -> usize {
        self.original.num_edges() - self.contracted.num_edges()
    }

    /// The original path a contracted path stands for.
    pub fn to_original_path(&self, path: &Path) -> Path {
        let mut out = Vec::new();
        for &e in path.edges() {
            let mut x = self.original_edge[e];
            out.push(x);
            while let Some(next) = self.exit[self.original.edge(x).head] {
                out.push(next);
                x = next;
            }
        }
        Path(out)
    }

    pub fn to_contracted_path(&self, path: &Path) -> Path {
        Path(path.edges().iter().filter_map(|&e| self.contracted_edge[e]).collect())
    }

    pub fn to_original_profile(&self, profile: &StrategyProfile) -> StrategyProfile {
        StrategyProfile::new(profile.entries().iter().map(|(c, p)| (*c, self.to_original_path(p))))
    }

    pub fn to_contracted_profile(&self, profile: &StrategyProfile) -> StrategyProfile {
        StrategyProfile::new(profile.entries().iter().map(|(c, p)| (*c, self.to_contracted_path(p))))
    }
}

/// Contracts dependent pairs until none is left. For a pair `(e, e')` with
/// `e` earlier, the tail of `e'` has `e'` as its only out-edge; that vertex
/// is merged into the head of `e'`, and `e` takes over the cost of `e'`.
pub fn contract_network(original: &Network) -> Result<ContractionMap> {
    let n_v = original.num_vertices();
    let mut arcs: Vec<(VertexId, VertexId)> = original.arcs();
    let mut edge_alive = vec![true; arcs.len()];
    let mut vertex_alive = vec![true; n_v];
    let mut absorbed: Vec<Vec<EdgeId>> = (0..arcs.len()).map(|e| vec![e]).collect();
    let mut exit: Vec<Option<EdgeId>> = vec![None; n_v];

    loop {
        let (net, ids) = working_network(original, &arcs, &edge_alive, &vertex_alive)?;
        let Some((e, f)) = find_dependent_pair(&net) else { break };
        let (keep, drop) = (ids[e], ids[f]);
        let (v, u) = arcs[drop];
        let outs = (0..arcs.len()).filter(|&x| edge_alive[x] && arcs[x].0 == v).count();
        if outs != 1 {
            return Err(Error::AlgorithmInvariantViolated(format!(
                "tail of contracted edge {drop} has {outs} out-edges"
            )));
        }
        for x in 0..arcs.len() {
            if edge_alive[x] && arcs[x].1 == v {
                arcs[x].1 = u;
            }
        }
        edge_alive[drop] = false;
        vertex_alive[v] = false;
        exit[v] = Some(drop);
        let moved = std::mem::take(&mut absorbed[drop]);
        absorbed[keep].extend(moved);
    }

    let (contracted, ids) = working_network(original, &arcs, &edge_alive, &vertex_alive)?;
    let mut contracted_edge = vec![None; arcs.len()];
    for (new, &old) in ids.iter().enumerate() {
        contracted_edge[old] = Some(new);
    }
    Ok(ContractionMap {
        original: original.clone(),
        contracted,
        absorbed: ids.iter().map(|&old| absorbed[old].clone()).collect(),
        original_edge: ids,
        contracted_edge,
        exit,
    })
}

/// The contracted game: each surviving edge costs the sum of the edges it
/// absorbed. Makes no queries.
pub fn preprocess_contract<S: Scalar>(game: &CongestionGame<S>) -> Result<(CongestionGame<S>, ContractionMap)> {
    let map = contract_network(game.network())?;
    let costs = map
        .absorbed
        .iter()
        .map(|group| {
            (0..=game.players())
                .map(|j| group.iter().fold(S::zero(), |acc, &x| acc + game.cost(x, j).clone()))
                .collect()
        })
        .collect();
    let reduced = CongestionGame::new(map.contracted.clone(), game.players(), costs)?;
    Ok((reduced, map))
}

/// Network on the live vertices and edges, renumbered in original order.
/// Also returns the original id of each edge.
fn working_network(
    original: &Network,
    arcs: &[(VertexId, VertexId)],
    edge_alive: &[bool],
    vertex_alive: &[bool],
) -> Result<(Network, Vec<EdgeId>)> {
    let mut renumber = vec![usize::MAX; vertex_alive.len()];
    let mut count = 0;
    for (v, &alive) in vertex_alive.iter().enumerate() {
        if alive {
            renumber[v] = count;
            count += 1;
        }
    }
    let ids: Vec<EdgeId> = (0..arcs.len()).filter(|&e| edge_alive[e]).collect();
    let new_arcs: Vec<(VertexId, VertexId)> = ids.iter().map(|&e| (renumber[arcs[e].0], renumber[arcs[e].1])).collect();
    let net = Network::new(count, &new_arcs, renumber[original.origin()], renumber[original.dest()])?;
    Ok((net, ids))
}

/// Congestion queries on the contracted game, answered by the oracle of
/// the original game one query each.
pub struct ContractedOracle<'m, O> {
    inner: O,
    map: &'m ContractionMap,
    players: usize,
}

impl<'m, O> ContractedOracle<'m, O> {
    pub fn new<S: Scalar>(inner: O, map: &'m ContractionMap) -> Self
    where
        O: CongestionQueries<S>,
    {
        let players = inner.players();
        Self { inner, map, players }
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<S: Scalar, O: CongestionQueries<S>> CongestionQueries<S> for ContractedOracle<'_, O> {
    fn players(&self) -> usize {
        self.players
    }

    fn network(&self) -> &Network {
        self.map.contracted()
    }

    fn query_loads(&mut self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        for p in q.loads().keys() {
            self.map.contracted().check_strategy(p)?;
        }
        let translated: Vec<(Path, Path)> =
            q.loads().keys().map(|p| (p.clone(), self.map.to_original_path(p))).collect();
        let original = LoadAssignment::new(translated.iter().map(|(p, o)| (o.clone(), q.loads()[p])));
        let answer = self.inner.query_loads(&original)?;
        Ok(translated.into_iter().map(|(p, o)| (p, answer[&o].clone())).collect())
    }

    fn queries_used(&self) -> usize {
        self.inner.queries_used()
    }
}
