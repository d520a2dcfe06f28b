//! Hard-instance families and seeded random games.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, CongestionGame, GraphicalGame, Network};
use crate::scalar::Scalar;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generalised matching pennies rescaled to [0,1]: the row player gets 1
/// on the diagonal, the column player gets `1 - row`.
pub fn matching_pennies<S: Scalar>(k: usize) -> Result<BimatrixGame<S>> {
    if k < 2 {
        return Err(Error::InvalidSpec(format!("matching pennies needs k >= 2, got {k}")));
    }
    let row: Vec<Vec<S>> =
        (0..k).map(|r| (0..k).map(|c| if r == c { S::one() } else { S::zero() }).collect()).collect();
    BimatrixGame::new(row.clone(), complement(&row))
}

fn complement<S: Scalar>(table: &[Vec<S>]) -> Vec<Vec<S>> {
    table.iter().map(|r| r.iter().map(|v| S::one() - v.clone()).collect()).collect()
}

/// The 0/1 rows of `G_ell`: every length-`ell` vector with `ell/2` ones,
/// in increasing order of the bitmask read with column 0 as the low bit.
pub fn g_ell_rows(ell: usize) -> Result<Vec<Vec<bool>>> {
    if ell < 4 || !ell.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!("ell must be even and at least 4, got {ell}")));
    }
    if ell > 24 {
        return Err(Error::InvalidSpec(format!("ell = {ell} gives too many rows")));
    }
    Ok((0u32..1 << ell)
        .filter(|m| m.count_ones() as usize == ell / 2)
        .map(|m| (0..ell).map(|c| m >> c & 1 == 1).collect())
        .collect())
}

/// `G_ell`: binomial(ell, ell/2) rows by `ell` columns, constant-sum.
pub fn g_ell<S: Scalar>(ell: usize) -> Result<BimatrixGame<S>> {
    let row: Vec<Vec<S>> = g_ell_rows(ell)?
        .into_iter()
        .map(|r| r.into_iter().map(|b| if b { S::one() } else { S::zero() }).collect())
        .collect();
    BimatrixGame::new(row.clone(), complement(&row))
}

/// `R^ell` on `k x k`: row `ell` (1-based) pays the row player 1, every
/// other entry pays 0; the column player always gets 0.
pub fn r_ell<S: Scalar>(k: usize, ell: usize) -> Result<BimatrixGame<S>> {
    if k < 2 {
        return Err(Error::InvalidSpec(format!("R^ell needs k >= 2, got {k}")));
    }
    if ell == 0 || ell > k {
        return Err(Error::InvalidSpec(format!("target row {ell} outside 1..={k}")));
    }
    let row = (0..k).map(|r| vec![if r + 1 == ell { S::one() } else { S::zero() }; k]).collect();
    BimatrixGame::new(row, vec![vec![S::zero(); k]; k])
}

/// A piecewise-constant link cost: `base` up to the first threshold, then
/// `f(j)` is the level of the last step whose threshold is below `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLink<S> {
    pub base: S,
    pub steps: Vec<(usize, S)>,
}

impl<S: Scalar> StepLink<S> {
    pub fn constant(level: S) -> Self {
        Self { base: level, steps: Vec::new() }
    }

    /// `low` for loads up to `at`, `high` above.
    pub fn single(at: usize, low: S, high: S) -> Self {
        Self { base: low, steps: vec![(at, high)] }
    }

    pub fn cost(&self, load: usize) -> S {
        self.steps.iter().rev().find(|(t, _)| *t < load).map_or_else(|| self.base.clone(), |(_, v)| v.clone())
    }
}

/// Parallel links with step costs; link `i` is `links[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLinkSpec<S> {
    pub players: usize,
    pub links: Vec<StepLink<S>>,
}

pub fn step_links<S: Scalar>(spec: &StepLinkSpec<S>) -> Result<CongestionGame<S>> {
    if spec.links.is_empty() {
        return Err(Error::InvalidSpec("need at least one link".into()));
    }
    let mut tables = Vec::with_capacity(spec.links.len());
    for (i, link) in spec.links.iter().enumerate() {
        if link.steps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSpec(format!("step thresholds of link {i} not increasing")));
        }
        let mut prev = &link.base;
        for (_, v) in &link.steps {
            if v < prev {
                return Err(Error::InvalidSpec(format!("link {i} has decreasing levels")));
            }
            prev = v;
        }
        if link.base.is_negative() {
            return Err(Error::InvalidSpec(format!("link {i} has a negative cost")));
        }
        tables.push((0..=spec.players).map(|j| link.cost(j)).collect());
    }
    CongestionGame::parallel_links(spec.players, tables)
}

/// Random multi-step links: each link gets up to `max_steps` thresholds in
/// `0..players` and integer levels rising by 1..=5 per step.
pub fn random_step_spec<S: Scalar>(m: usize, players: usize, max_steps: usize, seed: u64) -> Result<StepLinkSpec<S>> {
    if m == 0 || players == 0 {
        return Err(Error::InvalidSpec("need at least one link and one player".into()));
    }
    let mut r = rng(seed);
    let links = (0..m)
        .map(|_| {
            let mut level = r.gen_range(0..=20i64);
            let base = S::from_ratio(level, 1);
            let count = r.gen_range(0..=max_steps);
            let mut thresholds: Vec<usize> = (0..count).map(|_| r.gen_range(0..players)).collect();
            thresholds.sort_unstable();
            thresholds.dedup();
            let steps = thresholds
                .into_iter()
                .map(|t| {
                    level += r.gen_range(1..=5);
                    (t, S::from_ratio(level, 1))
                })
                .collect();
            StepLink { base, steps }
        })
        .collect();
    Ok(StepLinkSpec { players, links })
}

fn unit_value<S: Scalar>(r: &mut ChaCha8Rng, den: i64) -> S {
    S::from_ratio(r.gen_range(0..=den), den)
}

/// Random `rows x cols` bimatrix game with payoffs in `{0, 1/100, .., 1}`.
pub fn random_bimatrix<S: Scalar>(rows: usize, cols: usize, seed: u64) -> Result<BimatrixGame<S>> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSpec("bimatrix games need at least one row and column".into()));
    }
    let mut r = rng(seed);
    let mut table =
        || -> Vec<Vec<S>> { (0..rows).map(|_| (0..cols).map(|_| unit_value(&mut r, 100)).collect()).collect() };
    let row = table();
    let col = table();
    BimatrixGame::new(row, col)
}

/// Random graphical game: each player gets between 0 and `d` in-neighbors
/// and a payoff table with values in `{0, 1/20, .., 1}`.
pub fn random_graphical<S: Scalar>(n: usize, k: usize, d: usize, seed: u64) -> Result<GraphicalGame<S>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidSpec("need players and strategies".into()));
    }
    if d >= n {
        return Err(Error::InvalidSpec(format!("in-degree {d} impossible with {n} players")));
    }
    let mut r = rng(seed);
    let mut in_neighbors = Vec::with_capacity(n);
    let mut tables = Vec::with_capacity(n);
    for p in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&q| q != p).collect();
        others.shuffle(&mut r);
        let deg = r.gen_range(0..=d);
        let mut nbrs = others[..deg].to_vec();
        nbrs.sort_unstable();
        let size = k.pow(deg as u32 + 1);
        tables.push((0..size).map(|_| unit_value(&mut r, 20)).collect());
        in_neighbors.push(nbrs);
    }
    GraphicalGame::new(k, in_neighbors, tables)
}

fn random_costs<S: Scalar>(r: &mut ChaCha8Rng, players: usize) -> Vec<S> {
    let mut level = r.gen_range(0..=4i64);
    let mut table = vec![S::zero()];
    for _ in 0..players {
        table.push(S::from_ratio(level, 2));
        level += r.gen_range(0..=3);
    }
    table
}

/// Random DAG congestion game. Vertices are numbered in a topological
/// order with origin 0 and destination `vertices - 1`; every vertex gets an
/// edge from an earlier vertex and one to a later vertex, and the remaining
/// edges are forward edges between random pairs (parallel edges allowed).
pub fn random_dag<S: Scalar>(vertices: usize, edges: usize, players: usize, seed: u64) -> Result<CongestionGame<S>> {
    if vertices < 2 {
        return Err(Error::InvalidSpec("a DAG game needs at least two vertices".into()));
    }
    if edges + 1 < vertices {
        return Err(Error::InvalidSpec(format!("{edges} edges cannot connect {vertices} vertices")));
    }
    let mut r = rng(seed);
    let dest = vertices - 1;
    let mut arcs = None;
    for _ in 0..64 {
        let mut a: Vec<(usize, usize)> = (1..vertices).map(|v| (r.gen_range(0..v), v)).collect();
        for v in 0..dest {
            if !a.iter().any(|&(t, _)| t == v) {
                a.push((v, r.gen_range(v + 1..vertices)));
            }
        }
        if a.len() <= edges {
            arcs = Some(a);
            break;
        }
    }
    // a Hamiltonian backbone always fits in `vertices - 1` edges
    let mut arcs = arcs.unwrap_or_else(|| (1..vertices).map(|v| (v - 1, v)).collect());
    while arcs.len() < edges {
        let t = r.gen_range(0..dest);
        arcs.push((t, r.gen_range(t + 1..vertices)));
    }
    arcs.shuffle(&mut r);
    let network = Network::new(vertices, &arcs, 0, dest)?;
    let costs = (0..arcs.len()).map(|_| random_costs(&mut r, players)).collect();
    CongestionGame::new_pruned(network, players, costs)
}

/// Subdivides `chains` randomly chosen edges of `game` into two-edge
/// chains through a fresh vertex. Each half gets a random cost table, so
/// the two halves form a dependent pair.
pub fn inject_chains<S: Scalar>(game: &CongestionGame<S>, chains: usize, seed: u64) -> Result<CongestionGame<S>> {
    let mut r = rng(seed);
    let net = game.network();
    let mut arcs = net.arcs();
    let mut costs = game.cost_tables().to_vec();
    let mut vertices = net.num_vertices();
    for _ in 0..chains {
        let e = r.gen_range(0..arcs.len());
        let (t, h) = arcs[e];
        let x = vertices;
        vertices += 1;
        arcs[e] = (t, x);
        arcs.push((x, h));
        costs.push(random_costs(&mut r, game.players()));
    }
    let network = Network::new(vertices, &arcs, net.origin(), net.dest())?;
    CongestionGame::new(network, game.players(), costs)
}
