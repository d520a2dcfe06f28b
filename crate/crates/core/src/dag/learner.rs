//! Learning an equivalent cost function with exactly `|E|` congestion
//! queries per player count.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{EdgeId, LoadAssignment, Network, Path, VertexId};
use crate::oracle::CongestionQueries;
use crate::scalar::Scalar;

use super::contract::find_dependent_pair;
use super::paths::{bridge_pair, choose_p1_p3, choose_p4_p5, find_bridges};

/// Edge costs `f_e(j)` for loads `1..=players`, some possibly unknown.
/// Values can be added but never changed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCostFunction<S> {
    players: usize,
    values: Vec<Vec<Option<S>>>,
}

impl<S: Scalar> PartialCostFunction<S> {
    pub fn new(edges: usize, players: usize) -> Self {
        Self { players, values: vec![vec![None; players]; edges] }
    }

    /// A total function from tables indexed by load (entry 0 is ignored).
    pub fn from_tables(players: usize, tables: &[Vec<S>]) -> Result<Self> {
        let mut f = Self::new(tables.len(), players);
        for (e, t) in tables.iter().enumerate() {
            if t.len() != players + 1 {
                return Err(Error::InvalidGame(format!("table of edge {e} has {} entries", t.len())));
            }
            for (j, v) in t.iter().enumerate().skip(1) {
                f.set(e, j, v.clone())?;
            }
        }
        Ok(f)
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn num_edges(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, e: EdgeId, load: usize) -> Option<&S> {
        if load == 0 {
            return None;
        }
        self.values.get(e)?.get(load - 1)?.as_ref()
    }

    pub fn is_defined(&self, e: EdgeId, load: usize) -> bool {
        self.get(e, load).is_some()
    }

    pub fn set(&mut self, e: EdgeId, load: usize, value: S) -> Result<()> {
        if load == 0 || load > self.players || e >= self.values.len() {
            return Err(Error::AlgorithmInvariantViolated(format!("no slot for edge {e} at load {load}")));
        }
        let slot = &mut self.values[e][load - 1];
        if slot.is_some() {
            return Err(Error::AlgorithmInvariantViolated(format!("edge {e} at load {load} set twice")));
        }
        *slot = Some(value);
        Ok(())
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.defined_count() == self.values.len() * self.players
    }

    /// `f_e(load)`, with `f_e(0) = 0`.
    pub fn value(&self, e: EdgeId, load: usize) -> Result<S> {
        if load == 0 {
            return Ok(S::zero());
        }
        self.get(e, load)
            .cloned()
            .ok_or_else(|| Error::AlgorithmInvariantViolated(format!("cost of edge {e} at load {load} unknown")))
    }

    /// Full tables `[0, f(1), .., f(n)]`, if every value is known.
    pub fn tables(&self) -> Option<Vec<Vec<S>>> {
        self.values.iter().map(|row| std::iter::once(Some(S::zero())).chain(row.iter().cloned()).collect()).collect()
    }

    pub fn path_cost(&self, path: &Path, loads: &[usize]) -> Result<S> {
        path.edges().iter().try_fold(S::zero(), |acc, &e| Ok(acc + self.value(e, loads[e])?))
    }

    /// What a query would return if `self` were the true cost function.
    pub fn strategy_costs(&self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        let loads = edge_loads(self.num_edges(), q);
        q.loads().keys().map(|p| Ok((p.clone(), self.path_cost(p, &loads)?))).collect()
    }
}

/// Load on every edge under `q`.
pub fn edge_loads(edges: usize, q: &LoadAssignment) -> Vec<usize> {
    let mut loads = vec![0; edges];
    for (p, &c) in q.loads() {
        for &e in p.edges() {
            loads[e] += c;
        }
    }
    loads
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// One-player cost of an edge into an inner vertex, relative to the pivot.
    Tail,
    /// The zero-cost pivot edge into an inner vertex (no query).
    Pivot,
    /// One-player cost of an edge into the destination.
    Destination,
    Bridge,
    Incoming,
}

/// One learned value, with the query that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnStep<S> {
    pub load: usize,
    pub vertex: VertexId,
    pub kind: StepKind,
    pub edge: EdgeId,
    pub query: Option<LoadAssignment>,
    pub value: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedCosts<S> {
    pub costs: PartialCostFunction<S>,
    pub queries_used: usize,
    pub steps: Vec<LearnStep<S>>,
}

struct Learner<'o, S: Scalar, O: CongestionQueries<S>> {
    oracle: &'o mut O,
    net: Network,
    f: PartialCostFunction<S>,
    steps: Vec<LearnStep<S>>,
}

fn check_contracted(net: &Network) -> Result<()> {
    match find_dependent_pair(net) {
        Some((e, f)) => Err(Error::InvalidGame(format!("edges {e} and {f} are dependent; contract the network first"))),
        None => Ok(()),
    }
}

/// Learns a cost function equivalent to the hidden one: every strategy
/// costs the same under both, in every profile. The network must have no
/// dependent edge pairs (see [`super::preprocess_contract`]).
pub fn learn_costs<S: Scalar, O: CongestionQueries<S>>(oracle: &mut O) -> Result<LearnedCosts<S>> {
    let mut learned = learn_one_player(oracle)?;
    for i in 1..oracle.players() {
        learned = learn_level(oracle, learned, i)?;
    }
    Ok(learned)
}

/// One-player costs of every edge, one query per edge.
pub fn learn_one_player<S: Scalar, O: CongestionQueries<S>>(oracle: &mut O) -> Result<LearnedCosts<S>> {
    let net = oracle.network().clone();
    check_contracted(&net)?;
    let start = oracle.queries_used();
    let f = PartialCostFunction::new(net.num_edges(), oracle.players());
    let mut learner = Learner { oracle, net, f, steps: Vec::new() };
    if learner.f.players() > 0 {
        learner.one_player()?;
    }
    let queries_used = learner.oracle.queries_used() - start;
    Ok(LearnedCosts { costs: learner.f, queries_used, steps: learner.steps })
}

/// Extends costs known for loads `1..=i` to load `i + 1`, one query per edge.
pub fn learn_level<S: Scalar, O: CongestionQueries<S>>(
    oracle: &mut O,
    learned: LearnedCosts<S>,
    i: usize,
) -> Result<LearnedCosts<S>> {
    let net = oracle.network().clone();
    check_contracted(&net)?;
    let n = oracle.players();
    if i == 0 || i >= n || learned.costs.players() != n || learned.costs.num_edges() != net.num_edges() {
        return Err(Error::InvalidSpec(format!("cannot learn load {} of {n} from these costs", i + 1)));
    }
    if (0..net.num_edges()).any(|e| (1..=i).any(|j| !learned.costs.is_defined(e, j))) {
        return Err(Error::InvalidSpec(format!("costs for loads up to {i} are incomplete")));
    }
    let start = oracle.queries_used();
    let LearnedCosts { costs, queries_used, steps } = learned;
    let mut learner = Learner { oracle, net, f: costs, steps };
    learner.next_level(i)?;
    let queries_used = queries_used + learner.oracle.queries_used() - start;
    Ok(LearnedCosts { costs: learner.f, queries_used, steps: learner.steps })
}

impl<S: Scalar, O: CongestionQueries<S>> Learner<'_, S, O> {
    fn least(&self, from: VertexId, to: VertexId) -> Result<Path> {
        self.net
            .least_path(from, to, |_| false)
            .ok_or_else(|| Error::PathSelectionFailed(format!("no path from {from} to {to}")))
    }

    fn record(
        &mut self,
        load: usize,
        vertex: VertexId,
        kind: StepKind,
        edge: EdgeId,
        query: Option<LoadAssignment>,
        value: S,
    ) -> Result<()> {
        self.f.set(edge, load, value.clone())?;
        self.steps.push(LearnStep { load, vertex, kind, edge, query, value });
        Ok(())
    }

    /// Cost reported for `target` minus the known costs of all its edges
    /// except `unknown`, each at its actual load in the query.
    fn extract(&self, q: &LoadAssignment, answer: &BTreeMap<Path, S>, target: &Path, unknown: EdgeId) -> Result<S> {
        let loads = edge_loads(self.net.num_edges(), q);
        let mut value = answer
            .get(target)
            .cloned()
            .ok_or_else(|| Error::AlgorithmInvariantViolated(format!("no cost reported for {target}")))?;
        for &e in target.edges() {
            if e != unknown {
                value = value - self.f.value(e, loads[e])?;
            }
        }
        Ok(value)
    }

    fn one_player(&mut self) -> Result<()> {
        let (o, d) = (self.net.origin(), self.net.dest());
        for k in self.net.topological_order().to_vec() {
            if k == o {
                continue;
            }
            let mut ins = self.net.in_edges(k).to_vec();
            ins.sort_unstable();
            if k == d {
                for e in ins {
                    let p = Path::join([&self.least(o, self.net.edge(e).tail)?, &Path(vec![e])]);
                    let q = LoadAssignment::new([(p.clone(), 1)]);
                    let answer = self.oracle.query_loads(&q)?;
                    let value = self.extract(&q, &answer, &p, e)?;
                    self.record(1, k, StepKind::Destination, e, Some(q), value)?;
                }
                continue;
            }
            let rest = self.least(k, d)?;
            let mut tails = Vec::new();
            for &e in &ins {
                let head = Path::join([&self.least(o, self.net.edge(e).tail)?, &Path(vec![e])]);
                let full = Path::join([&head, &rest]);
                let q = LoadAssignment::new([(full.clone(), 1)]);
                let answer = self.oracle.query_loads(&q)?;
                let mut t = answer[&full].clone();
                for &x in head.edges().iter().filter(|&&x| x != e) {
                    t = t - self.f.value(x, 1)?;
                }
                tails.push((e, t, q));
            }
            let Some(pivot) = (0..tails.len()).reduce(|a, b| if tails[b].1 < tails[a].1 { b } else { a }) else {
                continue;
            };
            let base = tails[pivot].1.clone();
            for (idx, (e, t, q)) in tails.into_iter().enumerate() {
                if idx == pivot {
                    self.record(1, k, StepKind::Pivot, e, None, S::zero())?;
                } else {
                    self.record(1, k, StepKind::Tail, e, Some(q), t - base.clone())?;
                }
            }
        }
        Ok(())
    }

    /// Learns `f_e(i + 1)` for every edge, given all values up to `i`.
    fn next_level(&mut self, i: usize) -> Result<()> {
        let o = self.net.origin();
        for k in self.net.topological_order().to_vec() {
            let bridges = find_bridges(&self.net, k);
            let p2 = self.least(o, k)?;
            for j in (0..bridges.len()).rev() {
                let b = bridges[j];
                if self.f.is_defined(b, i + 1) {
                    continue;
                }
                let (p4, p5) = choose_p4_p5(&self.net, &bridges, j)?;
                let (p1, p3) = choose_p1_p3(&self.net, k, self.net.edge(b).tail, &p2)?;
                let bp = Path(vec![b]);
                let single = Path::join([&p1, &bp, &p4]);
                let group = Path::join([&p2, &p3, &bp, &p5]);
                let q = LoadAssignment::new([(single.clone(), 1), (group, i)]);
                let loads = edge_loads(self.net.num_edges(), &q);
                let later = &bridges[j + 1..];
                let pattern_ok = loads[b] == i + 1
                    && p4.edges().iter().all(|e| loads[*e] == if later.contains(e) { i + 1 } else { 1 });
                if !pattern_ok {
                    return Err(Error::AlgorithmInvariantViolated(format!(
                        "bridge query for edge {b} at vertex {k} has the wrong load pattern"
                    )));
                }
                let answer = self.oracle.query_loads(&q)?;
                let value = self.extract(&q, &answer, &single, b)?;
                self.record(i + 1, k, StepKind::Bridge, b, Some(q), value)?;
            }

            let mut ins = self.net.in_edges(k).to_vec();
            ins.sort_unstable();
            ins.retain(|&e| !self.f.is_defined(e, i + 1));
            if ins.is_empty() {
                continue;
            }
            let (q1, q2) = bridge_pair(&self.net, k, &bridges)?;
            for e in ins {
                let head = Path::join([&self.least(o, self.net.edge(e).tail)?, &Path(vec![e])]);
                let single = Path::join([&head, &q1]);
                let group = Path::join([&head, &q2]);
                let q = LoadAssignment::new([(single.clone(), 1), (group, i)]);
                let answer = self.oracle.query_loads(&q)?;
                let value = self.extract(&q, &answer, &single, e)?;
                self.record(i + 1, k, StepKind::Incoming, e, Some(q), value)?;
            }
        }
        Ok(())
    }
}
