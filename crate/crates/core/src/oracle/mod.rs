//! Hidden-game oracles. Solvers see only public metadata and the
//! answers to the queries they pay for.

mod adversary;
mod ledger;

use std::collections::BTreeMap;
use std::marker::PhantomData;

pub use adversary::{step_game, Adversary};
pub use ledger::{QueryLedger, TranscriptJson};

use crate::error::{Error, Result};
use crate::game::{CongestionGame, LoadAssignment, Network, Path, PayoffGame};
use crate::scalar::Scalar;

/// Payoff-query access to a hidden game with pure strategies.
pub struct PurePayoffOracle<S: Scalar, G: PayoffGame<S>> {
    game: G,
    ledger: QueryLedger<Vec<usize>, Vec<S>>,
    _scalar: PhantomData<S>,
}

impl<S: Scalar, G: PayoffGame<S>> PurePayoffOracle<S, G> {
    pub fn new(game: G) -> Self {
        Self::with_budget(game, None)
    }

    pub fn with_budget(game: G, budget: Option<usize>) -> Self {
        Self { game, ledger: QueryLedger::with_budget(budget), _scalar: PhantomData }
    }

    pub fn players(&self) -> usize {
        self.game.num_players()
    }

    pub fn strategies(&self, player: usize) -> usize {
        self.game.num_strategies(player)
    }

    /// Payoffs of every player at a pure profile. Malformed profiles are
    /// rejected without being counted.
    pub fn query_pure(&mut self, profile: &[usize]) -> Result<Vec<S>> {
        let n = self.game.num_players();
        if profile.len() != n {
            return Err(Error::InvalidProfile(format!("profile of length {} for {n} players", profile.len())));
        }
        for (p, &s) in profile.iter().enumerate() {
            if s >= self.game.num_strategies(p) {
                return Err(Error::InvalidProfile(format!("strategy {s} out of range for player {p}")));
            }
        }
        self.ledger.admit()?;
        let payoffs = self.game.payoffs_at(profile)?;
        self.ledger.record(profile.to_vec(), payoffs.clone());
        Ok(payoffs)
    }

    pub fn queries_used(&self) -> usize {
        self.ledger.count()
    }

    pub fn ledger(&self) -> &QueryLedger<Vec<usize>, Vec<S>> {
        &self.ledger
    }
}

/// Congestion-query access used by the congestion solvers and learners.
pub trait CongestionQueries<S: Scalar> {
    fn players(&self) -> usize;
    /// The strategy space: vertices, edges, origin and destination.
    fn network(&self) -> &Network;
    /// Cost of every strategy in `q`, with all loads applied at once.
    fn query_loads(&mut self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>>;
    fn queries_used(&self) -> usize;
}

/// Congestion-query access to a hidden [`CongestionGame`].
pub struct CongestionOracle<S: Scalar> {
    game: CongestionGame<S>,
    ledger: QueryLedger<LoadAssignment, BTreeMap<Path, S>>,
}

impl<S: Scalar> CongestionOracle<S> {
    pub fn new(game: CongestionGame<S>) -> Self {
        Self::with_budget(game, None)
    }

    pub fn with_budget(game: CongestionGame<S>, budget: Option<usize>) -> Self {
        Self { game, ledger: QueryLedger::with_budget(budget) }
    }

    pub fn ledger(&self) -> &QueryLedger<LoadAssignment, BTreeMap<Path, S>> {
        &self.ledger
    }
}

impl<S: Scalar> CongestionQueries<S> for CongestionOracle<S> {
    fn players(&self) -> usize {
        self.game.players()
    }

    fn network(&self) -> &Network {
        self.game.network()
    }

    fn query_loads(&mut self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        let n = self.game.players();
        for (p, &c) in q.loads() {
            if c > n {
                return Err(Error::LoadOutOfRange { load: c, players: n });
            }
            self.game.network().check_strategy(p)?;
        }
        // validate fully before charging the query
        let costs = self.game.strategy_costs(q)?;
        self.ledger.admit()?;
        self.ledger.record(q.clone(), costs.clone());
        Ok(costs)
    }

    fn queries_used(&self) -> usize {
        self.ledger.count()
    }
}

impl<S: Scalar, T: CongestionQueries<S> + ?Sized> CongestionQueries<S> for &mut T {
    fn players(&self) -> usize {
        (**self).players()
    }

    fn network(&self) -> &Network {
        (**self).network()
    }

    fn query_loads(&mut self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        (**self).query_loads(q)
    }

    fn queries_used(&self) -> usize {
        (**self).queries_used()
    }
}
