use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{in_unit_interval, PayoffGame};

/// An n-player game where each player's payoff depends only on its own
/// strategy and the strategies of its in-neighbors in the affects graph.
///
/// The table of player `p` is indexed by `own + k * joint`, where `joint`
/// is the mixed-radix number (base `k`) formed by the in-neighbors'
/// strategies in increasing player order, least significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphicalGame<S> {
    strategies: usize,
    in_neighbors: Vec<Vec<usize>>,
    tables: Vec<Vec<S>>,
}

impl<S: Scalar> GraphicalGame<S> {
    pub fn new(strategies: usize, in_neighbors: Vec<Vec<usize>>, tables: Vec<Vec<S>>) -> Result<Self> {
        let n = in_neighbors.len();
        if n == 0 || strategies == 0 {
            return Err(Error::InvalidGame("graphical game needs players and strategies".into()));
        }
        if tables.len() != n {
            return Err(Error::InvalidGame(format!("{} tables for {n} players", tables.len())));
        }
        for (p, (nbrs, table)) in in_neighbors.iter().zip(&tables).enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGame(format!("in-neighbors of {p} not strictly increasing")));
            }
            if nbrs.iter().any(|&q| q >= n || q == p) {
                return Err(Error::InvalidGame(format!("bad in-neighbor list for {p}")));
            }
            let want = strategies.pow(nbrs.len() as u32 + 1);
            if table.len() != want {
                return Err(Error::InvalidGame(format!("table of {p} has {} entries, expected {want}", table.len())));
            }
            if table.iter().any(|v| !in_unit_interval(v)) {
                return Err(Error::InvalidGame(format!("payoff of {p} outside [0,1]")));
            }
        }
        Ok(Self { strategies, in_neighbors, tables })
    }

    pub fn players(&self) -> usize {
        self.in_neighbors.len()
    }

    pub fn strategies(&self) -> usize {
        self.strategies
    }

    pub fn in_neighbors(&self, player: usize) -> &[usize] {
        &self.in_neighbors[player]
    }

    pub fn table(&self, player: usize) -> &[S] {
        &self.tables[player]
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Directed pairs `(p', p)` meaning p' is an in-neighbor of p.
    pub fn affects_edges(&self) -> BTreeSet<(usize, usize)> {
        self.in_neighbors.iter().enumerate().flat_map(|(p, nbrs)| nbrs.iter().map(move |&q| (q, p))).collect()
    }

    pub fn table_index(&self, player: usize, profile: &[usize]) -> usize {
        let k = self.strategies;
        let joint = self.in_neighbors[player].iter().rev().fold(0, |acc, &q| acc * k + profile[q]);
        profile[player] + k * joint
    }

    fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.players() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.players()
            )));
        }
        if let Some(s) = profile.iter().find(|&&s| s >= self.strategies) {
            return Err(Error::InvalidProfile(format!("strategy {s} out of range")));
        }
        Ok(())
    }

    pub fn payoff(&self, player: usize, profile: &[usize]) -> Result<S> {
        self.check_profile(profile)?;
        if player >= self.players() {
            return Err(Error::InvalidProfile(format!("no player {player}")));
        }
        Ok(self.tables[player][self.table_index(player, profile)].clone())
    }
}

impl<S: Scalar> PayoffGame<S> for GraphicalGame<S> {
    fn num_players(&self) -> usize {
        self.players()
    }

    fn num_strategies(&self, _player: usize) -> usize {
        self.strategies
    }

    fn payoffs_at(&self, profile: &[usize]) -> Result<Vec<S>> {
        self.check_profile(profile)?;
        Ok((0..self.players()).map(|p| self.tables[p][self.table_index(p, profile)].clone()).collect())
    }
}
