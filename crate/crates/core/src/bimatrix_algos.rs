//! Query algorithms for bimatrix games.

use crate::error::{Error, Result};
use crate::game::{first_maximizer, MixedProfile, PayoffGame};
use crate::oracle::PurePayoffOracle;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HalfNeResult<S> {
    pub profile: MixedProfile<S>,
    pub queries_used: usize,
    /// `(s1, s2, s3)`: the fixed row, the column best response to it, and
    /// the row best response to that column.
    pub trace: (usize, usize, usize),
}

/// Lowest index among the maximizers of `payoffs`.
pub fn tiebreak_best_response<S: Scalar>(payoffs: &[S]) -> Result<usize> {
    first_maximizer(payoffs).ok_or_else(|| Error::InvalidSpec("best response over no strategies".into()))
}

/// ½-approximate equilibrium with `cols + rows - 1` payoff queries.
///
/// Row 0 is queried in full; the column player's best response `s2` to it
/// fixes the column, whose remaining entries give the row best response
/// `s3`. The row player mixes evenly over rows 0 and `s3`.
pub fn half_approx_ne<S, G>(oracle: &mut PurePayoffOracle<S, G>) -> Result<HalfNeResult<S>>
where
    S: Scalar,
    G: PayoffGame<S>,
{
    if oracle.players() != 2 {
        return Err(Error::InvalidSpec(format!("expected a two-player game, got {}", oracle.players())));
    }
    let (rows, cols) = (oracle.strategies(0), oracle.strategies(1));
    let start = oracle.queries_used();
    let s1 = 0;

    let mut col_values = Vec::with_capacity(cols);
    let mut row_at_s1 = Vec::with_capacity(cols);
    for c in 0..cols {
        let p = oracle.query_pure(&[s1, c])?;
        row_at_s1.push(p[0].clone());
        col_values.push(p[1].clone());
    }
    let s2 = tiebreak_best_response(&col_values)?;

    let mut row_values = Vec::with_capacity(rows);
    for r in 0..rows {
        if r == s1 {
            row_values.push(row_at_s1[s2].clone());
        } else {
            row_values.push(oracle.query_pure(&[r, s2])?[0].clone());
        }
    }
    let s3 = tiebreak_best_response(&row_values)?;

    let half = S::from_ratio(1, 2);
    let mut row = vec![S::zero(); rows];
    row[s1] = row[s1].clone() + half.clone();
    row[s3] = row[s3].clone() + half;
    let mut col = vec![S::zero(); cols];
    col[s2] = S::one();
    Ok(HalfNeResult {
        profile: MixedProfile::new(row, col)?,
        queries_used: oracle.queries_used() - start,
        trace: (s1, s2, s3),
    })
}

/// Both players uniform; needs no queries.
pub fn uniform_profile<S: Scalar>(rows: usize, cols: usize) -> MixedProfile<S> {
    MixedProfile::uniform(rows, cols)
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::game::{regret, BimatrixGame};
    use crate::instances::matching_pennies;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn pennies_trace() {
        let g = matching_pennies::<Q>(2).unwrap();
        let mut o = PurePayoffOracle::new(g.clone());
        let res = half_approx_ne(&mut o).unwrap();
        assert_eq!(res.trace, (0, 1, 1));
        assert_eq!(res.profile.row, vec![q(1, 2), q(1, 2)]);
        assert_eq!(res.profile.col, vec![q(0, 1), q(1, 1)]);
        assert_eq!(res.queries_used, 3);
        assert_eq!(regret(&g, &res.profile).unwrap(), q(1, 2));
    }

    #[test]
    fn dominant_row_collapses_to_pure() {
        let row = vec![vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]];
        let col = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let g = BimatrixGame::new(row, col).unwrap();
        let res = half_approx_ne(&mut PurePayoffOracle::new(g.clone())).unwrap();
        assert_eq!(res.trace, (0, 0, 0));
        assert_eq!(res.profile, MixedProfile::pure(2, 2, 0, 0));
        assert_eq!(regret(&g, &res.profile).unwrap(), q(0, 1));
    }

    #[test]
    fn tiebreak() {
        assert_eq!(tiebreak_best_response(&[q(0, 1), q(1, 1), q(1, 1)]).unwrap(), 1);
        assert_eq!(tiebreak_best_response(&[q(5, 1)]).unwrap(), 0);
        assert_eq!(tiebreak_best_response(&[q(2, 1); 4]).unwrap(), 0);
        assert!(tiebreak_best_response::<Q>(&[]).is_err());
    }

    #[test]
    fn uniform_four() {
        let p = uniform_profile::<Q>(4, 4);
        assert_eq!(p.row, vec![q(1, 4); 4]);
        assert_eq!(p.col, vec![q(1, 4); 4]);
    }
}
