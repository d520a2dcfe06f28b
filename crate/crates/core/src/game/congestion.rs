use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::network::{EdgeId, Network, Path};
use super::profile::{LoadAssignment, StrategyProfile};

/// Symmetric network congestion game: `players` players each route one
/// unit from origin to destination; edge `e` costs `costs[e][load]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionGame<S> {
    network: Network,
    players: usize,
    costs: Vec<Vec<S>>,
}

impl<S: Scalar> CongestionGame<S> {
    /// Every cost table must have `players + 1` nonnegative, nondecreasing
    /// entries, and every vertex must lie on an o-d path.
    pub fn new(network: Network, players: usize, costs: Vec<Vec<S>>) -> Result<Self> {
        if costs.len() != network.num_edges() {
            return Err(Error::InvalidGame(format!("{} cost tables for {} edges", costs.len(), network.num_edges())));
        }
        for (e, table) in costs.iter().enumerate() {
            if table.len() != players + 1 {
                return Err(Error::InvalidGame(format!(
                    "cost table of edge {e} has {} entries, expected {}",
                    table.len(),
                    players + 1
                )));
            }
            if table.iter().any(|c| c.is_negative()) {
                return Err(Error::InvalidGame(format!("negative cost on edge {e}")));
            }
            if table.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidGame(format!("cost of edge {e} decreases with load")));
            }
        }
        let dead = network.dead_vertices();
        if !dead.is_empty() {
            return Err(Error::InvalidGame(format!("vertices {dead:?} lie on no o-d path")));
        }
        Ok(Self { network, players, costs })
    }

    /// Like [`Self::new`] but first deletes vertices on no o-d path
    /// together with their edges and cost tables.
    pub fn new_pruned(network: Network, players: usize, costs: Vec<Vec<S>>) -> Result<Self> {
        if costs.len() != network.num_edges() {
            return Self::new(network, players, costs);
        }
        let (net, old_ids) = network.pruned()?;
        let kept = old_ids.iter().map(|&e| costs[e].clone()).collect();
        Self::new(net, players, kept)
    }

    /// Parallel-links game; `tables[i]` is the cost of link `i`.
    pub fn parallel_links(players: usize, tables: Vec<Vec<S>>) -> Result<Self> {
        Self::new(Network::parallel_links(tables.len()), players, tables)
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn cost(&self, edge: EdgeId, load: usize) -> &S {
        &self.costs[edge][load]
    }

    pub fn cost_tables(&self) -> &[Vec<S>] {
        &self.costs
    }

    /// Link tables when the game is a parallel-links game.
    pub fn link_tables(&self) -> Option<&[Vec<S>]> {
        self.network.is_parallel_links().then_some(self.costs.as_slice())
    }

    pub fn enumerate_paths(&self) -> Vec<Path> {
        self.network.enumerate_paths()
    }

    /// Edge loads induced by a complete profile of exactly `players` players.
    pub fn edge_loads(&self, profile: &StrategyProfile) -> Result<Vec<usize>> {
        if profile.players() != self.players {
            return Err(Error::InvalidProfile(format!(
                "profile has {} players, game has {}",
                profile.players(),
                self.players
            )));
        }
        self.loads_of(profile.entries().iter().map(|(c, p)| (p, *c)))
    }

    /// Edge loads induced by a query payload (any total).
    pub fn assignment_loads(&self, q: &LoadAssignment) -> Result<Vec<usize>> {
        self.loads_of(q.loads().iter().map(|(p, c)| (p, *c)))
    }

    fn loads_of<'a>(&self, items: impl Iterator<Item = (&'a Path, usize)>) -> Result<Vec<usize>> {
        let mut loads = vec![0usize; self.network.num_edges()];
        for (path, count) in items {
            self.network.check_strategy(path)?;
            for &e in path.edges() {
                loads[e] += count;
            }
        }
        Ok(loads)
    }

    /// Cost of `path` when edge loads are `loads`.
    pub fn path_cost(&self, path: &Path, loads: &[usize]) -> Result<S> {
        let mut total = S::zero();
        for &e in path.edges() {
            let load = loads[e];
            if load > self.players {
                return Err(Error::LoadOutOfRange { load, players: self.players });
            }
            total = total + self.costs[e][load].clone();
        }
        Ok(total)
    }

    /// Cost of every strategy in the assignment under the induced edge loads.
    pub fn strategy_costs(&self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        let loads = self.assignment_loads(q)?;
        q.loads().keys().map(|p| Ok((p.clone(), self.path_cost(p, &loads)?))).collect()
    }

    /// Rosenthal potential of a complete profile.
    pub fn potential(&self, profile: &StrategyProfile) -> Result<S> {
        let loads = self.edge_loads(profile)?;
        let mut total = S::zero();
        for (e, &n_e) in loads.iter().enumerate() {
            for j in 1..=n_e {
                total = total + self.costs[e][j].clone();
            }
        }
        Ok(total)
    }
}
