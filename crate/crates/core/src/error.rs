use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("load {load} exceeds the player count {players}")]
    LoadOutOfRange { load: usize, players: usize },
    #[error("graph contains a directed cycle")]
    NotADag,
    #[error("invalid instance parameters: {0}")]
    InvalidSpec(String),
    #[error("query budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },
    #[error("algorithm invariant violated: {0}")]
    AlgorithmInvariantViolated(String),
    #[error("player {player} violates the in-degree promise: {detail}")]
    DegreeViolation { player: usize, detail: String },
    #[error("path selection failed: {0}")]
    PathSelectionFailed(String),
    #[error("instance too large: {size} exceeds cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("best-response dynamics did not terminate after {steps} moves")]
    PotentialNotDecreasing { steps: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
