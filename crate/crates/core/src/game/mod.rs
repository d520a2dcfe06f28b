//! Game representations and their exact evaluation semantics.

mod bimatrix;
mod congestion;
mod graphical;
mod network;
mod profile;

pub use bimatrix::{regret, BimatrixGame, MixedProfile};
pub use congestion::CongestionGame;
pub use graphical::GraphicalGame;
pub use network::{Edge, EdgeId, Network, Path, VertexId};
pub use profile::{LoadAssignment, StrategyProfile};

use crate::error::Result;
use crate::scalar::Scalar;

/// A finite game in which every player picks one of finitely many pure
/// strategies and receives a payoff. Implemented by the games that a
/// [`crate::oracle::PurePayoffOracle`] can hide.
pub trait PayoffGame<S: Scalar> {
    fn num_players(&self) -> usize;
    fn num_strategies(&self, player: usize) -> usize;
    /// Payoffs of all players at a pure profile (strategies are 0-based).
    fn payoffs_at(&self, profile: &[usize]) -> Result<Vec<S>>;
}

/// Lowest index among the maximizers of `values`.
pub fn first_maximizer<S: Scalar>(values: &[S]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

pub(crate) fn in_unit_interval<S: Scalar>(v: &S) -> bool {
    *v >= S::zero() && *v <= S::one()
}
