//! Learning the affects graph and payoff tables of a degree-`d`
//! graphical game from payoff queries.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::game::{GraphicalGame, PayoffGame};
use crate::oracle::PurePayoffOracle;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedGraphicalGame<S> {
    pub game: GraphicalGame<S>,
    pub affects_edges: BTreeSet<(usize, usize)>,
    /// For each edge `(q, p)`, two probed profiles that differ only in
    /// `q`'s strategy and give `p` different payoffs.
    pub witnesses: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)>,
    pub queries_used: usize,
}

/// Number of profiles in which at most `d + 1` of `n` players leave strategy 0.
pub fn probe_set_size(n: usize, k: usize, d: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for j in 0..=(d + 1).min(n) {
        total += binom * (k as u128 - 1).pow(j as u32);
        binom = binom * (n - j) as u128 / (j as u128 + 1);
    }
    total
}

/// Every profile in which at most `d + 1` players leave strategy 0, ordered
/// by the set of deviators (by size, then lexicographically) and then by
/// their strategies.
pub fn build_probe_set(n: usize, k: usize, d: usize) -> Result<Vec<Vec<usize>>> {
    if d + 1 > n {
        return Err(Error::InvalidSpec(format!("d + 1 = {} exceeds n = {n}", d + 1)));
    }
    if k == 0 {
        return Err(Error::InvalidSpec("need at least one strategy".into()));
    }
    let mut out = Vec::new();
    for size in 0..=d + 1 {
        for set in subsets(n, size) {
            let mut digits = vec![1usize; size];
            loop {
                if k > 1 || size == 0 {
                    let mut profile = vec![0; n];
                    for (&p, &s) in set.iter().zip(&digits) {
                        profile[p] = s;
                    }
                    out.push(profile);
                }
                if k <= 1 || !advance(&mut digits, 1, k) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Increasing `size`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    if size > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Odometer over digits in `lo..hi`, last digit fastest. False when exhausted.
fn advance(digits: &mut [usize], lo: usize, hi: usize) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] + 1 < hi {
            digits[i] += 1;
            return true;
        }
        digits[i] = lo;
    }
    false
}

/// Queries the probe set once, finds the affects graph from pairs of probes
/// that differ in one player, and reads each payoff table off the probes in
/// which only the player and its in-neighbors leave strategy 0.
///
/// If the hidden game breaks the in-degree promise this returns
/// `DegreeViolation` whenever the probes expose it (too many detected
/// in-neighbors, or a probe the learned table fails to reproduce).
pub fn learn_graphical<S, G>(oracle: &mut PurePayoffOracle<S, G>, d: usize) -> Result<LearnedGraphicalGame<S>>
where
    S: Scalar,
    G: PayoffGame<S>,
{
    let n = oracle.players();
    let k = oracle.strategies(0);
    if (1..n).any(|p| oracle.strategies(p) != k) {
        return Err(Error::InvalidSpec("players must share one strategy count".into()));
    }
    let start = oracle.queries_used();
    let probes = build_probe_set(n, k, d)?;
    let mut payoffs: HashMap<Vec<usize>, Vec<S>> = HashMap::with_capacity(probes.len());
    for s in &probes {
        let v = oracle.query_pure(s)?;
        payoffs.insert(s.clone(), v);
    }

    // group probes that agree everywhere except player q
    let mut groups: HashMap<(usize, Vec<usize>), Vec<usize>> = HashMap::new();
    for (idx, s) in probes.iter().enumerate() {
        for q in 0..n {
            let mut ctx = s.clone();
            ctx[q] = usize::MAX;
            groups.entry((q, ctx)).or_default().push(idx);
        }
    }
    let mut witnesses = BTreeMap::new();
    let mut keys: Vec<&(usize, Vec<usize>)> = groups.keys().collect();
    keys.sort();
    for key in keys {
        let q = key.0;
        let members = &groups[key];
        let first = &probes[members[0]];
        for p in (0..n).filter(|&p| p != q) {
            if witnesses.contains_key(&(q, p)) {
                continue;
            }
            let base = &payoffs[first][p];
            if let Some(&other) = members[1..].iter().find(|&&m| payoffs[&probes[m]][p] != *base) {
                witnesses.insert((q, p), (first.clone(), probes[other].clone()));
            }
        }
    }
    let affects_edges: BTreeSet<(usize, usize)> = witnesses.keys().copied().collect();

    let mut in_neighbors = vec![Vec::new(); n];
    for &(q, p) in &affects_edges {
        in_neighbors[p].push(q);
    }
    let mut tables = Vec::with_capacity(n);
    for p in 0..n {
        let nbrs = &in_neighbors[p];
        if nbrs.len() > d {
            return Err(Error::DegreeViolation {
                player: p,
                detail: format!("{} in-neighbors detected, promise was {d}", nbrs.len()),
            });
        }
        let size = k.pow(nbrs.len() as u32 + 1);
        let mut table = Vec::with_capacity(size);
        for idx in 0..size {
            let mut profile = vec![0; n];
            profile[p] = idx % k;
            let mut joint = idx / k;
            for &q in nbrs {
                profile[q] = joint % k;
                joint /= k;
            }
            table.push(payoffs[&profile][p].clone());
        }
        tables.push(table);
    }
    let game = GraphicalGame::new(k, in_neighbors, tables)?;

    for s in &probes {
        let got = &payoffs[s];
        for p in 0..n {
            if game.payoff(p, s)? != got[p] {
                return Err(Error::DegreeViolation {
                    player: p,
                    detail: format!("learned table disagrees with probe {s:?}"),
                });
            }
        }
    }

    Ok(LearnedGraphicalGame { game, affects_edges, witnesses, queries_used: oracle.queries_used() - start })
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    type Q = Ratio<i64>;

    fn q(v: i64) -> Q {
        Q::from_integer(v)
    }

    #[test]
    fn probe_set_sizes() {
        assert_eq!(build_probe_set(3, 2, 1).unwrap().len(), 7);
        assert_eq!(build_probe_set(2, 2, 1).unwrap().len(), 4);
        assert_eq!(build_probe_set(5, 3, 0).unwrap().len(), 11);
        assert_eq!(probe_set_size(6, 2, 1), 22);
        assert!(build_probe_set(2, 2, 2).is_err());
    }

    #[test]
    fn probe_set_has_no_duplicates() {
        let s = build_probe_set(4, 3, 1).unwrap();
        let set: BTreeSet<_> = s.iter().cloned().collect();
        assert_eq!(set.len(), s.len());
        assert_eq!(s.len() as u128, probe_set_size(4, 3, 1));
        assert!(s.iter().all(|p| p.iter().filter(|&&x| x != 0).count() <= 2));
    }

    #[test]
    fn independent_player_gets_no_edge() {
        // player 1 is constant regardless of player 0
        let g = GraphicalGame::new(2, vec![vec![], vec![]], vec![vec![q(0), q(1)], vec![q(1), q(1)]]).unwrap();
        let learned = learn_graphical(&mut PurePayoffOracle::new(g), 1).unwrap();
        assert!(learned.affects_edges.is_empty());
        assert_eq!(learned.queries_used, 4);
    }

    #[test]
    fn directed_cycle_recovered() {
        let copy = vec![q(1), q(0), q(0), q(1)];
        let g = GraphicalGame::new(2, vec![vec![2], vec![0], vec![1]], vec![copy.clone(), copy.clone(), copy]).unwrap();
        let learned = learn_graphical(&mut PurePayoffOracle::new(g.clone()), 1).unwrap();
        assert_eq!(learned.affects_edges, BTreeSet::from([(2, 0), (0, 1), (1, 2)]));
        assert_eq!(learned.queries_used, 7);
        for (&(a, b), (s, t)) in &learned.witnesses {
            let differ: Vec<usize> = (0..3).filter(|&i| s[i] != t[i]).collect();
            assert_eq!(differ, vec![a]);
            assert_ne!(g.payoff(b, s).unwrap(), g.payoff(b, t).unwrap());
        }
    }

    #[test]
    fn broken_degree_promise_detected() {
        // player 0 is paid (s1 + s2) / 2 while the promise claims d = 0
        let t0: Vec<Q> = (0..8).map(|i| Q::new(((i >> 1) & 1) + ((i >> 2) & 1), 2)).collect();
        let flat = vec![q(0), q(0)];
        let g = GraphicalGame::new(2, vec![vec![1, 2], vec![], vec![]], vec![t0, flat.clone(), flat]).unwrap();
        let r = learn_graphical(&mut PurePayoffOracle::new(g), 0);
        assert!(matches!(r, Err(Error::DegreeViolation { player: 0, .. })));
    }
}
