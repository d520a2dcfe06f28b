//! Ground truth for the test suites: brute-force equilibria, greedy
//! parallel-links equilibria, equivalence of cost functions and exact 2x2
//! equilibria. Only game evaluation is shared with the solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, CongestionGame, MixedProfile, Network, Path, StrategyProfile};
use crate::scalar::Scalar;

/// Default limit on the number of profiles an exhaustive check may visit.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// The exhaustive-enumeration cap, overridable with `PQLAB_CAP`.
pub fn brute_force_cap() -> u128 {
    std::env::var("PQLAB_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// Number of ways to place `players` anonymous players on `paths` paths.
pub fn multiset_count(paths: usize, players: usize) -> u128 {
    if paths == 0 {
        return u128::from(players == 0);
    }
    // C(players + paths - 1, players), saturating
    let mut acc: u128 = 1;
    for i in 0..players as u128 {
        let num = paths as u128 - 1 + i + 1;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `visit` with every vector of path counts summing to `players`.
fn for_each_split(paths: usize, players: usize, visit: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(
        at: usize,
        left: usize,
        counts: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if at + 1 == counts.len() {
            counts[at] = left;
            return visit(counts);
        }
        for c in (0..=left).rev() {
            counts[at] = c;
            rec(at + 1, left - c, counts, visit)?;
        }
        counts[at] = 0;
        Ok(())
    }
    if paths == 0 {
        return Ok(());
    }
    rec(0, players, &mut vec![0; paths], visit)
}

fn loads_of(net: &Network, paths: &[Path], counts: &[usize]) -> Vec<usize> {
    let mut loads = vec![0; net.num_edges()];
    for (p, &c) in paths.iter().zip(counts) {
        for &e in p.edges() {
            loads[e] += c;
        }
    }
    loads
}

fn table_cost<S: Scalar>(tables: &[Vec<S>], path: &Path, loads: &[usize]) -> S {
    path.edges().iter().fold(S::zero(), |acc, &e| acc + tables[e][loads[e]].clone())
}

/// The best single-player deviation from a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport<S> {
    pub profile: StrategyProfile,
    /// Strategy of the player with the largest gain, if anyone can move.
    pub player: Option<Path>,
    pub alternative: Option<Path>,
    /// Cost decrease of that move; `≤ 0` iff the profile is a pure NE.
    pub improvement: S,
}

impl<S: Scalar> DeviationReport<S> {
    pub fn is_equilibrium(&self) -> bool {
        self.improvement <= S::zero()
    }
}

fn deviation_from_counts<S: Scalar>(game: &CongestionGame<S>, paths: &[Path], counts: &[usize]) -> DeviationReport<S> {
    let tables = game.cost_tables();
    let loads = loads_of(game.network(), paths, counts);
    let mut best: Option<(usize, usize, S)> = None;
    for (i, p) in paths.iter().enumerate() {
        if counts[i] == 0 {
            continue;
        }
        let own = table_cost(tables, p, &loads);
        for (j, q) in paths.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut moved = loads.clone();
            for &e in p.edges() {
                moved[e] -= 1;
            }
            for &e in q.edges() {
                moved[e] += 1;
            }
            let gain = own.clone() - table_cost(tables, q, &moved);
            if best.as_ref().is_none_or(|(_, _, g)| gain > *g) {
                best = Some((i, j, gain));
            }
        }
    }
    let profile = StrategyProfile::new(paths.iter().zip(counts).map(|(p, &c)| (c, p.clone())));
    match best {
        Some((i, j, gain)) => DeviationReport {
            profile,
            player: Some(paths[i].clone()),
            alternative: Some(paths[j].clone()),
            improvement: gain,
        },
        None => DeviationReport { profile, player: None, alternative: None, improvement: S::zero() },
    }
}

/// Checks every single-player deviation to every other o-d path.
pub fn deviation_report<S: Scalar>(game: &CongestionGame<S>, profile: &StrategyProfile) -> Result<DeviationReport<S>> {
    if profile.players() != game.players() {
        return Err(Error::InvalidProfile(format!(
            "profile has {} players, game has {}",
            profile.players(),
            game.players()
        )));
    }
    let mut paths = game.enumerate_paths();
    for (_, p) in profile.entries() {
        game.network().check_strategy(p)?;
        if !paths.contains(p) {
            paths.push(p.clone());
        }
    }
    let counts: Vec<usize> = paths.iter().map(|p| profile.count_of(p)).collect();
    Ok(deviation_from_counts(game, &paths, &counts))
}

/// Every pure Nash equilibrium, enumerating anonymous profiles (how many
/// players use each path).
pub fn brute_force_pure_ne<S: Scalar>(game: &CongestionGame<S>) -> Result<Vec<StrategyProfile>> {
    let paths = game.enumerate_paths();
    let size = multiset_count(paths.len(), game.players());
    let cap = brute_force_cap();
    if size > cap {
        return Err(Error::TooLarge { size, cap });
    }
    let mut found = Vec::new();
    for_each_split(paths.len(), game.players(), &mut |counts| {
        let report = deviation_from_counts(game, &paths, counts);
        if report.is_equilibrium() {
            found.push(report.profile);
        }
        Ok(())
    })?;
    Ok(found)
}

/// Inserts players one at a time on a link with the cheapest next slot.
/// Ties go to the less loaded link, then to the lower index.
pub fn greedy_parallel_ne<S: Scalar>(tables: &[Vec<S>], players: usize) -> Result<Vec<usize>> {
    if tables.is_empty() {
        return Err(Error::InvalidGame("no links".into()));
    }
    if let Some(i) = tables.iter().position(|t| t.len() <= players) {
        return Err(Error::InvalidGame(format!("table of link {i} is too short")));
    }
    let mut loads = vec![0; tables.len()];
    for _ in 0..players {
        let mut pick = 0;
        for i in 1..tables.len() {
            let (a, b) = (&tables[i][loads[i] + 1], &tables[pick][loads[pick] + 1]);
            if a < b || (a == b && loads[i] < loads[pick]) {
                pick = i;
            }
        }
        loads[pick] += 1;
    }
    Ok(loads)
}

/// Whether no single player on parallel links gains by switching links.
pub fn is_link_equilibrium<S: Scalar>(tables: &[Vec<S>], loads: &[usize]) -> bool {
    (0..loads.len()).all(|i| {
        loads[i] == 0
            || (0..loads.len()).all(|j| i == j || tables[j].get(loads[j] + 1).is_none_or(|t| tables[i][loads[i]] <= *t))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// A profile and strategy on which two cost functions disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<S> {
    pub profile: StrategyProfile,
    pub path: Path,
    pub ours: S,
    pub truth: S,
}

/// Compares the cost of every used strategy under `f` and `truth`, both
/// tables `[e][load]` for loads `0..=players`. Returns the first profile
/// where they differ, or `None` if equivalent on all profiles visited.
pub fn check_equivalence<S: Scalar>(
    f: &[Vec<S>],
    truth: &[Vec<S>],
    net: &Network,
    players: usize,
    mode: EquivalenceMode,
) -> Result<Option<Counterexample<S>>> {
    for (name, t) in [("candidate", f), ("reference", truth)] {
        if t.len() != net.num_edges() || t.iter().any(|row| row.len() != players + 1) {
            return Err(Error::InvalidGame(format!("{name} tables do not match the network")));
        }
    }
    let paths = net.enumerate_paths();
    let mut found = None;
    let mut check = |counts: &[usize]| -> Result<()> {
        if found.is_some() {
            return Ok(());
        }
        let loads = loads_of(net, &paths, counts);
        for (p, &c) in paths.iter().zip(counts) {
            if c == 0 {
                continue;
            }
            let (ours, want) = (table_cost(f, p, &loads), table_cost(truth, p, &loads));
            if !ours.near(&want) {
                found = Some(Counterexample {
                    profile: StrategyProfile::new(paths.iter().zip(counts).map(|(q, &k)| (k, q.clone()))),
                    path: p.clone(),
                    ours,
                    truth: want,
                });
                return Ok(());
            }
        }
        Ok(())
    };
    match mode {
        EquivalenceMode::Exhaustive => {
            let size = multiset_count(paths.len(), players);
            let cap = brute_force_cap();
            if size > cap {
                return Err(Error::TooLarge { size, cap });
            }
            for_each_split(paths.len(), players, &mut check)?;
        }
        EquivalenceMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let mut counts = vec![0; paths.len()];
                for _ in 0..players {
                    counts[rng.gen_range(0..paths.len())] += 1;
                }
                check(&counts)?;
            }
        }
    }
    Ok(found)
}

/// An exact Nash equilibrium of a 2x2 game: the first pure one in
/// row-major order, otherwise the unique fully mixed one.
pub fn exact_ne_2x2<S: Scalar>(game: &BimatrixGame<S>) -> Result<MixedProfile<S>> {
    if game.rows() != 2 || game.cols() != 2 {
        return Err(Error::InvalidGame(format!("need a 2x2 game, got {}x{}", game.rows(), game.cols())));
    }
    let a = game.row_table();
    let b = game.col_table();
    for r in 0..2 {
        for c in 0..2 {
            if a[r][c] >= a[1 - r][c] && b[r][c] >= b[r][1 - c] {
                return Ok(MixedProfile::pure(2, 2, r, c));
            }
        }
    }
    // column mixes to make the row player indifferent, and vice versa
    let q =
        (a[1][1].clone() - a[0][1].clone()) / (a[0][0].clone() - a[0][1].clone() - a[1][0].clone() + a[1][1].clone());
    let p =
        (b[1][1].clone() - b[1][0].clone()) / (b[0][0].clone() - b[1][0].clone() - b[0][1].clone() + b[1][1].clone());
    Ok(MixedProfile { row: vec![p.clone(), S::one() - p], col: vec![q.clone(), S::one() - q] })
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::game::regret;

    type Q = Ratio<i64>;

    fn t(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| Q::from_integer(x)).collect()
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(2, 4), 5);
        assert_eq!(multiset_count(4, 2), 10);
        assert_eq!(multiset_count(1, 9), 1);
        assert_eq!(multiset_count(0, 0), 1);
        let mut seen = 0;
        for_each_split(4, 2, &mut |c| {
            assert_eq!(c.iter().sum::<usize>(), 2);
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 10);
    }

    #[test]
    fn step_pair_has_only_even_split() {
        let g = CongestionGame::parallel_links(4, vec![t(&[1, 1, 1, 1, 1]), t(&[0, 0, 0, 2, 2])]).unwrap();
        let ne = brute_force_pure_ne(&g).unwrap();
        assert!(!ne.is_empty());
        for s in &ne {
            assert_eq!(s.link_loads(2).unwrap(), vec![2, 2]);
        }
    }

    #[test]
    fn single_path_single_profile() {
        let net = Network::new(2, &[(0, 1)], 0, 1).unwrap();
        let g = CongestionGame::new(net, 3, vec![t(&[0, 1, 2, 3])]).unwrap();
        assert_eq!(brute_force_pure_ne(&g).unwrap().len(), 1);
    }

    #[test]
    fn greedy_on_step_game() {
        let step = t(&[0, 0, 0, 0, 0, 0, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]);
        let flat = vec![Q::from_integer(1); 17];
        let loads = greedy_parallel_ne(&[step.clone(), flat.clone()], 16).unwrap();
        assert_eq!(loads, vec![5, 11]);
        assert!(is_link_equilibrium(&[step, flat], &loads));
        let zero = vec![vec![Q::from_integer(0); 4]; 3];
        assert_eq!(greedy_parallel_ne(&zero, 3).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn deviation_report_finds_gain() {
        let g = CongestionGame::parallel_links(2, vec![t(&[0, 1, 5]), t(&[0, 1, 5])]).unwrap();
        let stacked = StrategyProfile::from_link_loads(&[2, 0]);
        let r = deviation_report(&g, &stacked).unwrap();
        assert_eq!(r.improvement, Q::from_integer(4));
        assert_eq!(r.alternative, Some(Path(vec![1])));
        let split = StrategyProfile::from_link_loads(&[1, 1]);
        assert!(deviation_report(&g, &split).unwrap().is_equilibrium());
    }

    #[test]
    fn equivalence_and_mutation() {
        let net = Network::new(3, &[(0, 1), (0, 1), (1, 2), (1, 2)], 0, 2).unwrap();
        let truth = vec![t(&[0, 1, 1]), t(&[0, 1, 1]), t(&[0, 0, 0]), t(&[0, 0, 0])];
        let shifted = vec![t(&[0, 0, 0]), t(&[0, 0, 0]), t(&[0, 1, 1]), t(&[0, 1, 1])];
        let modes = [EquivalenceMode::Exhaustive, EquivalenceMode::Sampled { samples: 50, seed: 3 }];
        for mode in modes {
            assert!(check_equivalence(&truth, &truth, &net, 2, mode).unwrap().is_none());
            assert!(check_equivalence(&shifted, &truth, &net, 2, mode).unwrap().is_none());
        }
        let mut broken = shifted.clone();
        broken[3][2] += Q::from_integer(1);
        let cex = check_equivalence(&broken, &truth, &net, 2, EquivalenceMode::Exhaustive).unwrap().unwrap();
        assert!(cex.path.contains(3));
        assert_eq!(cex.ours - cex.truth, Q::from_integer(1));
    }

    #[test]
    fn two_by_two_equilibria() {
        let (one, zero) = (Q::from_integer(1), Q::from_integer(0));
        let pennies =
            BimatrixGame::new(vec![vec![one, zero], vec![zero, one]], vec![vec![zero, one], vec![one, zero]]).unwrap();
        let ne = exact_ne_2x2(&pennies).unwrap();
        assert_eq!(ne, MixedProfile::uniform(2, 2));
        assert_eq!(regret(&pennies, &ne).unwrap(), zero);

        let half = Q::new(1, 2);
        let dominant =
            BimatrixGame::new(vec![vec![one, one], vec![zero, zero]], vec![vec![half, one], vec![one, zero]]).unwrap();
        assert_eq!(exact_ne_2x2(&dominant).unwrap(), MixedProfile::pure(2, 2, 0, 1));
    }
}
