//! Acceptance criteria 1-10. Each test prints one PASS/FAIL line; run with
//! `cargo test --release --test acceptance -- --nocapture --test-threads 1`
//! to see them in order.

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqlab::bimatrix_algos::{half_approx_ne, uniform_profile};
use pqlab::dag::{contract_network, learn_and_solve, preprocess_contract};
use pqlab::game::{regret, BimatrixGame, CongestionGame, LoadAssignment, MixedProfile, Network, Path};
use pqlab::graphical_learner::learn_graphical;
use pqlab::instances::{
    g_ell, inject_chains, random_bimatrix, random_dag, random_graphical, random_step_spec, step_links,
};
use pqlab::oracle::{step_game, Adversary, CongestionOracle, CongestionQueries, PurePayoffOracle};
use pqlab::parallel_links::{query_bound, solve_parallel_links};
use pqlab::verify::{
    brute_force_pure_ne, check_equivalence, deviation_report, exact_ne_2x2, is_link_equilibrium, EquivalenceMode,
};
use pqlab::{Rational as Q, Result};

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn verdict(id: usize, title: &str, ok: bool, detail: &str, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let limit_text = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    println!("{status} criterion {id:>2}: {title}: {detail}; {:.2}s{limit_text}", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time limit");
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Whether moving any `delta` players off a link (the special link may
/// give up a partial group) never lowers their cost.
fn delta_equilibrium(tables: &[Vec<Q>], loads: &[usize], delta: usize, special: usize) -> bool {
    let m = loads.len();
    for i in 0..m {
        if i != special && !loads[i].is_multiple_of(delta) {
            return false;
        }
        if loads[i] < delta {
            continue;
        }
        for j in 0..m {
            if j != i && loads[j] + delta < tables[j].len() && tables[i][loads[i]] > tables[j][loads[j] + delta] {
                return false;
            }
        }
    }
    true
}

#[test]
fn criterion_01_half_ne_query_bound() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst = Q::zero();
    for seed in 0..1000 {
        let game: BimatrixGame<Q> = random_bimatrix(10, 10, seed).unwrap();
        let mut oracle = PurePayoffOracle::new(game.clone());
        let res = half_approx_ne(&mut oracle).unwrap();
        let r = regret(&game, &res.profile).unwrap();
        worst = worst.max(r);
        if res.queries_used != 19 || oracle.queries_used() != 19 || r > q(1, 2) {
            bad.push(seed);
        }
    }
    let detail = format!("1000 games, all 19 queries, max regret {worst}, failures {bad:?}");
    verdict(1, "half-NE with 2k-1 queries", bad.is_empty(), &detail, start.elapsed(), Some(Duration::from_secs(10)));
}

#[test]
fn criterion_02_uniform_fallback() {
    let start = Instant::now();
    let mut worst = Q::zero();
    for seed in 0..1000 {
        let game: BimatrixGame<Q> = random_bimatrix(4, 4, 10_000 + seed).unwrap();
        worst = worst.max(regret(&game, &uniform_profile(4, 4)).unwrap());
    }
    let ok = worst <= q(3, 4);
    verdict(2, "uniform profile is a 3/4-NE at k=4", ok, &format!("max regret {worst}"), start.elapsed(), None);
}

#[test]
fn criterion_03_g_ell_identities() {
    let start = Instant::now();
    let mut checks = 0;
    let mut ok = true;
    for ell in [4usize, 6, 8] {
        let game: BimatrixGame<Q> = g_ell(ell).unwrap();
        let l = ell as i64;
        for alpha in [q(1, l) + q(1, 8), q(1, 4), q(1, 2)] {
            let expected = alpha + (Q::one() - alpha) * q(l / 2 - 1, l - 1);
            let floor = q(1, 2) + alpha / 2 - q(1, 2 * l);
            for j in 0..ell {
                let rows_j: Vec<usize> = (0..game.rows()).filter(|&r| game.row_table()[r][j] == Q::one()).collect();
                let row: Vec<Q> = (0..game.rows())
                    .map(|r| if rows_j.contains(&r) { q(1, rows_j.len() as i64) } else { Q::zero() })
                    .collect();
                // the rest of the column mass spread evenly, or all on one other column
                let spread: Vec<Q> = (0..ell)
                    .map(|c| if c == j { alpha } else { (Q::one() - alpha) / Q::from_integer(l - 1) })
                    .collect();
                let other = (j + 1) % ell;
                let lumped: Vec<Q> = (0..ell)
                    .map(|c| {
                        if c == j {
                            alpha
                        } else if c == other {
                            Q::one() - alpha
                        } else {
                            Q::zero()
                        }
                    })
                    .collect();
                for col in [spread, lumped] {
                    let profile = MixedProfile::new(row.clone(), col).unwrap();
                    let (payoff, _) = game.expected_payoffs(&profile).unwrap();
                    // the bound is strict only above 1/ell; at alpha = 1/ell it is tight
                    let above = if alpha > q(1, l) { payoff > floor } else { payoff == floor };
                    ok &= payoff == expected && above;
                    checks += 1;
                }
            }
        }
    }
    let detail = format!("{checks} exact identities, e.g. ell=8, alpha=1/4 gives 4/7");
    verdict(3, "G_ell row payoff identities", ok, &detail, start.elapsed(), None);
}

#[test]
fn criterion_04_one_entry_changes_the_equilibrium() {
    let start = Instant::now();
    let (one, zero) = (Q::one(), Q::zero());
    let base = vec![vec![one, zero], vec![zero, one]];
    let pennies = BimatrixGame::new(base.clone(), complement(&base)).unwrap();
    let base_ne = exact_ne_2x2(&pennies).unwrap();
    let mut ok = base_ne == MixedProfile::uniform(2, 2) && regret(&pennies, &base_ne).unwrap() == zero;
    let mut shown = Vec::new();
    // whichever single entry a 3-query algorithm leaves unseen can be changed
    for r in 0..2 {
        for c in 0..2 {
            let mut row = base.clone();
            row[r][c] = if row[r][c] == one { q(99, 100) } else { q(1, 100) };
            let perturbed = BimatrixGame::new(row.clone(), complement(&row)).unwrap();
            let ne = exact_ne_2x2(&perturbed).unwrap();
            let unique = no_pure_ne(&perturbed);
            ok &= unique && regret(&perturbed, &ne).unwrap() == zero && ne != base_ne;
            shown.push(format!("({r},{c}) -> row {}", ne.row[0]));
        }
    }
    let detail = format!("pennies NE uniform; perturbed cells give {}", shown.join(", "));
    verdict(4, "zero-sum 2x2 games differing in one entry", ok, &detail, start.elapsed(), None);
}

fn complement(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    rows.iter().map(|r| r.iter().map(|v| Q::one() - v).collect()).collect()
}

/// With no pure equilibrium a 2x2 game has exactly one equilibrium.
fn no_pure_ne(g: &BimatrixGame<Q>) -> bool {
    let (a, b) = (g.row_table(), g.col_table());
    (0..2).all(|r| (0..2).all(|c| a[r][c] < a[1 - r][c] || b[r][c] < b[r][1 - c]))
}

#[test]
fn criterion_05_graphical_learner() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut total_queries = 0;
    for seed in 0..200 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(2..=3);
        let d = rng.gen_range(0..=2.min(n - 1));
        let game = random_graphical::<Q>(n, k, d, seed).unwrap();
        let mut oracle = PurePayoffOracle::new(game.clone());
        let learned = learn_graphical(&mut oracle, d).unwrap();
        let expected: u128 =
            (0..=d + 1).map(|j| binomial(n as u128, j as u128) * ((k - 1) as u128).pow(j as u32)).sum();
        let cap = ((n * k) as u128).pow(d as u32 + 1);
        let mut same = true;
        let mut profile = vec![0; n];
        loop {
            for p in 0..n {
                same &= game.payoff(p, &profile).unwrap() == learned.game.payoff(p, &profile).unwrap();
            }
            let Some(i) = (0..n).find(|&i| profile[i] + 1 < k) else { break };
            profile[i] += 1;
            profile[..i].iter_mut().for_each(|x| *x = 0);
        }
        total_queries += learned.queries_used;
        if !same
            || learned.queries_used as u128 != expected
            || expected >= cap
            || oracle.queries_used() != learned.queries_used
        {
            failures.push(seed);
        }
    }
    let detail = format!("200 games, {total_queries} queries in total, failures {failures:?}");
    verdict(
        5,
        "graphical games learned exactly",
        failures.is_empty(),
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_06_parallel_links_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut largest = 0;
    for seed in 0..200u64 {
        let m = rng.gen_range(1..=16);
        let n = (10f64.powf(rng.gen_range(0.0..5.0)) as usize).clamp(1, 100_000);
        largest = largest.max(n);
        let game = step_links::<Q>(&random_step_spec(m, n, 4, seed).unwrap()).unwrap();
        let tables = game.link_tables().unwrap().to_vec();
        let res = solve_parallel_links(CongestionOracle::new(game), None).unwrap();
        let mut ok = res.loads.iter().sum::<usize>() == n && is_link_equilibrium(&tables, &res.loads);
        for phase in &res.phases {
            ok &= delta_equilibrium(&tables, &phase.loads, phase.delta, res.special_link);
            ok &= phase.moved_in.iter().all(|&g| g <= 2 * res.kf);
            ok &= phase.moved_in.iter().sum::<usize>() <= res.kf * m;
        }
        if !ok {
            failures.push(seed);
        }
    }
    let detail = format!("200 instances up to n={largest}, failures {failures:?}");
    verdict(6, "parallel links exact equilibrium and move bounds", failures.is_empty(), &detail, start.elapsed(), None);
}

#[test]
fn criterion_07_parallel_links_query_scaling() {
    let start = Instant::now();
    let mut ok = true;
    let mut totals = [0usize; 2];
    let mut worst = 0.0f64;
    // different n give different random games, so compare totals over seeds
    for seed in 0..10u64 {
        let mut used = [0usize; 2];
        for (slot, n) in [1usize << 10, 1 << 20].into_iter().enumerate() {
            let game = step_links::<Q>(&random_step_spec(8, n, 4, seed).unwrap()).unwrap();
            let mut oracle = CongestionOracle::new(game);
            let res = solve_parallel_links(&mut oracle, None).unwrap();
            ok &= oracle.queries_used() == res.queries_used && res.queries_used <= query_bound(8, n, res.kf);
            used[slot] = res.queries_used;
            totals[slot] += res.queries_used;
        }
        worst = worst.max(used[1] as f64 / used[0] as f64);
    }
    let ratio = totals[1] as f64 / totals[0] as f64;
    ok &= ratio <= 2.5;
    let detail = format!(
        "m=8, 10 seeds: ledger within bound, total ledger {} at 2^20 vs {} at 2^10, ratio {ratio:.2} (worst single seed {worst:.2})",
        totals[1], totals[0]
    );
    verdict(7, "parallel links query scaling", ok, &detail, start.elapsed(), None);
}

/// Forwards to the adversary and records the number of consistent step
/// locations after every query.
struct Watched<'a> {
    adversary: &'a mut Adversary<Q>,
    gaps: Vec<usize>,
}

impl CongestionQueries<Q> for Watched<'_> {
    fn players(&self) -> usize {
        self.adversary.players()
    }
    fn network(&self) -> &Network {
        self.adversary.network()
    }
    fn query_loads(&mut self, q: &LoadAssignment) -> Result<std::collections::BTreeMap<Path, Q>> {
        let out = self.adversary.query_loads(q)?;
        self.gaps.push(self.adversary.consistent_completions().len());
        Ok(out)
    }
    fn queries_used(&self) -> usize {
        self.adversary.queries_used()
    }
}

#[test]
fn criterion_08_adversary_lower_bound() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for bits in 6..=20u32 {
        let n = 1usize << bits;
        let mut adversary = Adversary::<Q>::new(n).unwrap();
        let mut watched = Watched { adversary: &mut adversary, gaps: Vec::new() };
        let res = solve_parallel_links(&mut watched, None).unwrap();
        let gaps = watched.gaps;
        // completions after q queries, for q = 0, 1, ...
        let before: Vec<usize> = std::iter::once(n).chain(gaps.iter().copied()).collect();
        let open_until = before.iter().position(|&g| g <= 1).unwrap_or(before.len());
        ok &= open_until >= bits as usize;
        ok &= before.windows(2).all(|w| 2 * w[1] + 2 >= w[0]);
        // the output must hold up in every game the adversary can still commit to
        for loc in adversary.consistent_completions() {
            let game = step_game::<Q>(n, loc).unwrap();
            ok &= is_link_equilibrium(game.link_tables().unwrap(), &res.loads);
            ok &= replays(&adversary, &game);
        }
        parts.push(format!("2^{bits}: {} queries, open for {open_until}", res.queries_used));
    }
    verdict(
        8,
        "adversary keeps at least two games open for log2 n queries",
        ok,
        &parts.join("; "),
        start.elapsed(),
        None,
    );
}

/// Whether `game` answers every logged query exactly as the adversary did.
fn replays(adversary: &Adversary<Q>, game: &CongestionGame<Q>) -> bool {
    adversary.ledger().log().iter().all(|(query, answer)| game.strategy_costs(query).unwrap() == *answer)
}

fn dag_instance(seed: u64, rng: &mut ChaCha8Rng, chains: usize) -> CongestionGame<Q> {
    loop {
        let v = rng.gen_range(3..=8);
        let e = rng.gen_range(v..=14);
        let n = rng.gen_range(1..=4);
        let base: CongestionGame<Q> = random_dag(v, e, n, seed).unwrap();
        let game = if chains > 0 { inject_chains(&base, chains, seed).unwrap() } else { base };
        let contracted = contract_network(game.network()).unwrap();
        if contracted.contracted().num_vertices() <= 8 && contracted.contracted().num_edges() <= 14 {
            return game;
        }
    }
}

#[test]
fn criterion_09_dag_learner() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let mut queries = 0;
    for seed in 0..100 {
        let game = dag_instance(seed, &mut rng, 0);
        let mut oracle = CongestionOracle::new(game.clone());
        let sol = learn_and_solve(&mut oracle).unwrap();
        let (reduced, _) = preprocess_contract(&game).unwrap();
        let learned = sol.learned.costs.tables().unwrap();
        let cex = check_equivalence(
            &learned,
            reduced.cost_tables(),
            reduced.network(),
            game.players(),
            EquivalenceMode::Exhaustive,
        )
        .unwrap();
        let exact_count = oracle.queries_used() == reduced.network().num_edges() * game.players();
        let ne = deviation_report(&game, &sol.profile).unwrap().is_equilibrium();
        queries += oracle.queries_used();
        if cex.is_some() || !exact_count || !ne {
            failures.push(seed);
        }
    }
    let detail = format!("100 DAGs, {queries} queries = sum of |E|*n, failures {failures:?}");
    verdict(
        9,
        "DAG learner equivalence, query count and equilibrium",
        failures.is_empty(),
        &detail,
        start.elapsed(),
        Some(Duration::from_secs(120)),
    );
}

#[test]
fn criterion_10_preprocessing() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    let mut removed = 0;
    for seed in 0..100 {
        let chains = rng.gen_range(1..=3);
        let game = dag_instance(seed, &mut rng, chains);
        let oracle = CongestionOracle::new(game.clone());
        let map = contract_network(oracle.network()).unwrap();
        let (reduced, _) = preprocess_contract(&game).unwrap();
        removed += map.removed_edges();
        let mut ok = oracle.queries_used() == 0 && map.removed_edges() > 0;
        let equilibria = brute_force_pure_ne(&reduced).unwrap();
        ok &= !equilibria.is_empty();
        for profile in &equilibria {
            let original = map.to_original_profile(profile);
            ok &= deviation_report(&game, &original).unwrap().is_equilibrium();
        }
        if !ok {
            failures.push(seed);
        }
    }
    let detail = format!("100 DAGs with chains, {removed} edges contracted, failures {failures:?}");
    verdict(10, "contracted equilibria map back to equilibria", failures.is_empty(), &detail, start.elapsed(), None);
}
