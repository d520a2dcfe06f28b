use crate::error::{Error, Result};
use crate::scalar::{max_of, Scalar};

use super::{in_unit_interval, PayoffGame};

/// Two-player game given by row and column payoff tables with entries in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame<S> {
    rows: usize,
    cols: usize,
    row_payoff: Vec<Vec<S>>,
    col_payoff: Vec<Vec<S>>,
}

impl<S: Scalar> BimatrixGame<S> {
    pub fn new(row_payoff: Vec<Vec<S>>, col_payoff: Vec<Vec<S>>) -> Result<Self> {
        let rows = row_payoff.len();
        if rows == 0 || col_payoff.len() != rows {
            return Err(Error::InvalidGame("payoff tables must have the same nonzero row count".into()));
        }
        let cols = row_payoff[0].len();
        if cols == 0 {
            return Err(Error::InvalidGame("payoff tables need at least one column".into()));
        }
        for (r, (a, b)) in row_payoff.iter().zip(&col_payoff).enumerate() {
            if a.len() != cols || b.len() != cols {
                return Err(Error::InvalidGame(format!("row {r} has the wrong width")));
            }
            if let Some(v) = a.iter().chain(b).find(|v| !in_unit_interval(*v)) {
                return Err(Error::InvalidGame(format!("payoff {v:?} in row {r} outside [0,1]")));
            }
        }
        Ok(Self { rows, cols, row_payoff, col_payoff })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_table(&self) -> &[Vec<S>] {
        &self.row_payoff
    }

    pub fn col_table(&self) -> &[Vec<S>] {
        &self.col_payoff
    }

    /// Payoffs `(row player, column player)` at the pure profile `(row, col)`.
    pub fn payoffs(&self, row: usize, col: usize) -> Result<(S, S)> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::InvalidProfile(format!("({row},{col}) outside a {}x{} game", self.rows, self.cols)));
        }
        Ok((self.row_payoff[row][col].clone(), self.col_payoff[row][col].clone()))
    }

    /// Expected payoff of each pure row against the column mixture.
    pub fn row_pure_values(&self, col_dist: &[S]) -> Vec<S> {
        self.row_payoff.iter().map(|row| dot(row.iter(), col_dist)).collect()
    }

    /// Expected payoff of each pure column against the row mixture.
    pub fn col_pure_values(&self, row_dist: &[S]) -> Vec<S> {
        (0..self.cols).map(|c| dot(self.col_payoff.iter().map(|row| &row[c]), row_dist)).collect()
    }

    /// Expected payoffs of both players under a mixed profile.
    pub fn expected_payoffs(&self, profile: &MixedProfile<S>) -> Result<(S, S)> {
        self.check_dims(profile)?;
        let row = dot(self.row_pure_values(&profile.col).iter(), &profile.row);
        let col = dot(self.col_pure_values(&profile.row).iter(), &profile.col);
        Ok((row, col))
    }

    fn check_dims(&self, profile: &MixedProfile<S>) -> Result<()> {
        if profile.row.len() != self.rows || profile.col.len() != self.cols {
            return Err(Error::InvalidProfile(format!(
                "profile is {}x{}, game is {}x{}",
                profile.row.len(),
                profile.col.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> PayoffGame<S> for BimatrixGame<S> {
    fn num_players(&self) -> usize {
        2
    }

    fn num_strategies(&self, player: usize) -> usize {
        if player == 0 {
            self.rows
        } else {
            self.cols
        }
    }

    fn payoffs_at(&self, profile: &[usize]) -> Result<Vec<S>> {
        match profile {
            [r, c] => {
                let (a, b) = self.payoffs(*r, *c)?;
                Ok(vec![a, b])
            }
            _ => Err(Error::InvalidProfile(format!("bimatrix profile needs 2 entries, got {}", profile.len()))),
        }
    }
}

fn dot<'a, S: Scalar>(values: impl Iterator<Item = &'a S>, weights: &[S]) -> S {
    values.zip(weights).fold(S::zero(), |acc, (v, w)| acc + v.clone() * w.clone())
}

/// A pair of probability vectors, one per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile<S> {
    pub row: Vec<S>,
    pub col: Vec<S>,
}

impl<S: Scalar> MixedProfile<S> {
    pub fn new(row: Vec<S>, col: Vec<S>) -> Result<Self> {
        for (name, dist) in [("row", &row), ("column", &col)] {
            if dist.is_empty() {
                return Err(Error::InvalidProfile(format!("{name} distribution is empty")));
            }
            if dist.iter().any(|p| *p < S::zero()) {
                return Err(Error::InvalidProfile(format!("{name} distribution has a negative entry")));
            }
            let total = dist.iter().cloned().fold(S::zero(), |a, b| a + b);
            if !total.near(&S::one()) {
                return Err(Error::InvalidProfile(format!("{name} distribution sums to {total:?}")));
            }
        }
        Ok(Self { row, col })
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self { row: vec![S::from_ratio(1, rows as i64); rows], col: vec![S::from_ratio(1, cols as i64); cols] }
    }

    pub fn pure(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let point = |k: usize, i: usize| (0..k).map(|j| if j == i { S::one() } else { S::zero() }).collect::<Vec<_>>();
        Self { row: point(rows, row), col: point(cols, col) }
    }
}

/// Largest gain either player can obtain by a unilateral deviation.
/// The profile is an ε-Nash equilibrium iff the result is at most ε.
pub fn regret<S: Scalar>(game: &BimatrixGame<S>, profile: &MixedProfile<S>) -> Result<S> {
    let (row_value, col_value) = game.expected_payoffs(profile)?;
    let best_row = max_of(game.row_pure_values(&profile.col)).unwrap_or_else(S::zero);
    let best_col = max_of(game.col_pure_values(&profile.row)).unwrap_or_else(S::zero);
    let row_gain = best_row - row_value;
    let col_gain = best_col - col_value;
    Ok(if row_gain >= col_gain { row_gain } else { col_gain })
}
