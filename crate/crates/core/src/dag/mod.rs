//! Learning and solving symmetric network congestion games on DAGs.
//!
//! The pipeline is: contract dependent edge pairs, learn an equivalent
//! cost function with `|E|` queries per player count, then find a pure
//! equilibrium of the learned game with no further queries.

mod contract;
mod flow;
mod learner;
mod paths;
mod solve;

pub use contract::{
    contract_network, dependent, find_dependent_pair, preprocess_contract, ContractedOracle, ContractionMap,
};
pub use flow::disjoint_paths;
pub use learner::{
    edge_loads, learn_costs, learn_level, learn_one_player, LearnStep, LearnedCosts, PartialCostFunction, StepKind,
};
pub use paths::{bridge_pair, choose_p1_p3, choose_p4_p5, find_bridges};
pub use solve::{cheapest_path, solve_learned_game};

use crate::error::Result;
use crate::game::StrategyProfile;
use crate::oracle::CongestionQueries;
use crate::scalar::Scalar;

/// Default cap on improvement steps when solving a learned game.
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct DagSolution<S> {
    /// Equilibrium profile on the original network.
    pub profile: StrategyProfile,
    pub learned: LearnedCosts<S>,
    pub map: ContractionMap,
    pub queries_used: usize,
}

/// Contracts the oracle's network, learns the contracted game and returns
/// a pure equilibrium of the original game.
pub fn learn_and_solve<S: Scalar, O: CongestionQueries<S>>(oracle: &mut O) -> Result<DagSolution<S>> {
    let map = contract_network(oracle.network())?;
    let players = oracle.players();
    let learned = {
        let mut inner = ContractedOracle::new(&mut *oracle, &map);
        learn_costs(&mut inner)?
    };
    let reduced = solve_learned_game(&learned.costs, map.contracted(), players, MAX_STEPS)?;
    Ok(DagSolution { profile: map.to_original_profile(&reduced), queries_used: learned.queries_used, learned, map })
}
