use std::collections::BTreeMap;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::game::{CongestionGame, LoadAssignment, Network, Path};
use crate::scalar::Scalar;

use super::{CongestionQueries, QueryLedger};

/// Adaptive oracle for two parallel links that delays committing to a game.
///
/// Link 0 has a single-step cost, 0 up to the step location and 2 above it;
/// link 1 costs 1 at every load. The adversary keeps the step location
/// inside `l..u` and answers every query so that as many locations as
/// possible stay consistent.
pub struct Adversary<S: Scalar> {
    players: usize,
    l: usize,
    u: usize,
    network: Network,
    ledger: QueryLedger<LoadAssignment, BTreeMap<Path, S>>,
    _scalar: PhantomData<S>,
}

impl<S: Scalar> Adversary<S> {
    pub fn new(players: usize) -> Result<Self> {
        Self::with_budget(players, None)
    }

    pub fn with_budget(players: usize, budget: Option<usize>) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidSpec("the adversary needs at least one player".into()));
        }
        Ok(Self {
            players,
            l: 0,
            u: players,
            network: Network::parallel_links(2),
            ledger: QueryLedger::with_budget(budget),
            _scalar: PhantomData,
        })
    }

    pub fn lower(&self) -> usize {
        self.l
    }

    pub fn upper(&self) -> usize {
        self.u
    }

    /// Answer for `x` players on the step link, as costs `(link 0, link 1)`.
    pub fn respond(&mut self, x: usize) -> (S, S) {
        let low = (S::zero(), S::one());
        let high = (S::from_count(2), S::one());
        if x <= self.l {
            low
        } else if x >= self.u {
            high
        } else if 2 * x < self.u + self.l {
            self.l = x;
            low
        } else {
            self.u = x;
            high
        }
    }

    /// Step locations `l..u` still consistent with every answer given.
    pub fn consistent_completions(&self) -> Vec<usize> {
        (self.l..self.u).collect()
    }

    /// The two-link game with the step at `location`: link 0 costs 0 for
    /// loads up to `location` and 2 above.
    pub fn completion(&self, location: usize) -> Result<CongestionGame<S>> {
        step_game(self.players, location)
    }

    pub fn ledger(&self) -> &QueryLedger<LoadAssignment, BTreeMap<Path, S>> {
        &self.ledger
    }
}

/// The two-link family used by [`Adversary`].
pub fn step_game<S: Scalar>(players: usize, location: usize) -> Result<CongestionGame<S>> {
    if location >= players {
        return Err(Error::InvalidSpec(format!("step location {location} not below {players}")));
    }
    let step = (0..=players).map(|j| if j <= location { S::zero() } else { S::from_count(2) }).collect();
    let flat = vec![S::one(); players + 1];
    CongestionGame::parallel_links(players, vec![step, flat])
}

impl<S: Scalar> CongestionQueries<S> for Adversary<S> {
    fn players(&self) -> usize {
        self.players
    }

    fn network(&self) -> &Network {
        &self.network
    }

    fn query_loads(&mut self, q: &LoadAssignment) -> Result<BTreeMap<Path, S>> {
        let mut x = 0;
        for (p, &c) in q.loads() {
            if c > self.players {
                return Err(Error::LoadOutOfRange { load: c, players: self.players });
            }
            match p.edges() {
                [0] => x = c,
                [1] => {}
                _ => return Err(Error::InvalidProfile(format!("{p} is not one of the two links"))),
            }
        }
        self.ledger.admit()?;
        let (c0, c1) = self.respond(x);
        let mut out = BTreeMap::new();
        for p in q.loads().keys() {
            let c = if p.edges() == [0] { c0.clone() } else { c1.clone() };
            out.insert(p.clone(), c);
        }
        self.ledger.record(q.clone(), out.clone());
        Ok(out)
    }

    fn queries_used(&self) -> usize {
        self.ledger.count()
    }
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    type Q = Ratio<i64>;

    #[test]
    fn documented_trace() {
        let mut a = Adversary::<Q>::new(8).unwrap();
        assert_eq!(a.consistent_completions(), (0..8).collect::<Vec<_>>());
        assert_eq!(a.respond(4), (Q::from_integer(2), Q::from_integer(1)));
        assert_eq!(a.upper(), 4);
        assert_eq!(a.respond(2), (Q::from_integer(2), Q::from_integer(1)));
        assert_eq!(a.upper(), 2);
        assert_eq!(a.respond(0), (Q::from_integer(0), Q::from_integer(1)));
        assert_eq!((a.lower(), a.upper()), (0, 2));
    }

    #[test]
    fn midpoint_is_exact() {
        // u+l = 5: x=2 is below 2.5, x=3 is not
        let mut a = Adversary::<Q>::new(5).unwrap();
        a.respond(2);
        assert_eq!(a.lower(), 2);
        let mut b = Adversary::<Q>::new(5).unwrap();
        b.respond(3);
        assert_eq!(b.upper(), 3);
    }

    #[test]
    fn query_interface_counts_and_validates() {
        let mut a = Adversary::<Q>::new(4).unwrap();
        assert!(a.query_loads(&LoadAssignment::links(&[5, 0])).is_err());
        let r = a.query_loads(&LoadAssignment::links(&[3, 1])).unwrap();
        assert_eq!(r[&Path(vec![0])], Q::from_integer(2));
        assert_eq!(r[&Path(vec![1])], Q::from_integer(1));
        assert_eq!(a.queries_used(), 1);
        assert_eq!(a.consistent_completions(), vec![0, 1, 2]);
    }
}
