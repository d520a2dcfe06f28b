//! Payoff-query algorithms for equilibria of bimatrix, graphical and
//! symmetric network congestion games.
//!
//! Games are generic over a [`Scalar`]; the aliases below fix the exact
//! rational instantiation that the solvers and verifiers are tested with.

pub mod bimatrix_algos;
pub mod dag;
pub mod error;
pub mod format;
pub mod game;
pub mod graphical_learner;
pub mod instances;
pub mod oracle;
pub mod parallel_links;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rational = num_rational::Ratio<i64>;

pub type ExactBimatrix = game::BimatrixGame<Rational>;
pub type ExactGraphical = game::GraphicalGame<Rational>;
pub type ExactCongestion = game::CongestionGame<Rational>;
