//! Query-count sweeps over instance sizes, written as CSV.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use pqlab::bimatrix_algos::half_approx_ne;
use pqlab::dag::{contract_network, learn_and_solve};
use pqlab::game::CongestionGame;
use pqlab::graphical_learner::{learn_graphical, probe_set_size};
use pqlab::instances::{random_bimatrix, random_dag, random_graphical, random_step_spec, step_links};
use pqlab::oracle::{CongestionOracle, PurePayoffOracle};
use pqlab::parallel_links::{default_kf, query_bound, solve_parallel_links};
use pqlab::verify::multiset_count;
use pqlab::Rational;

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    ParallelLinks,
    Dag,
    Graphical,
    Bimatrix,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    family: Family,
    /// Player counts
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Links (parallel links) or edges before contraction (DAGs)
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Strategies per player
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// In-degree bounds for graphical games
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long)]
    kf: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One grid cell. `exhaustive` is the trivial query count (every pure
/// profile, or every table entry for parallel links).
#[derive(Serialize)]
struct Row {
    family: &'static str,
    n: usize,
    m: usize,
    k: usize,
    d: usize,
    seed: u64,
    queries_used: usize,
    bound: String,
    exhaustive: String,
    fraction: String,
}

fn fraction(queries: usize, total: u128) -> String {
    format!("{:.6e}", queries as f64 / total as f64)
}

fn or_default(v: &[usize], default: &[usize]) -> Vec<usize> {
    if v.is_empty() {
        default.to_vec()
    } else {
        v.to_vec()
    }
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let mut rows = Vec::new();
    let seed = args.seed;
    match args.family {
        Family::ParallelLinks => {
            let ns = or_default(&args.n, &[1 << 8, 1 << 10, 1 << 12, 1 << 14, 1 << 16, 1 << 18, 1 << 20]);
            for m in or_default(&args.m, &[8]) {
                for &n in &ns {
                    let game = step_links::<Rational>(&random_step_spec(m, n, 3, seed)?)?;
                    let mut oracle = CongestionOracle::new(game);
                    let res = solve_parallel_links(&mut oracle, args.kf)?;
                    let kf = args.kf.unwrap_or_else(|| default_kf(m));
                    let total = (n as u128) * (m as u128);
                    rows.push(Row {
                        family: "parallel-links",
                        n,
                        m,
                        k: m,
                        d: 0,
                        seed,
                        queries_used: res.queries_used,
                        bound: query_bound(m, n, kf).to_string(),
                        exhaustive: total.to_string(),
                        fraction: fraction(res.queries_used, total),
                    });
                }
            }
        }
        Family::Dag => {
            let ns = or_default(&args.n, &[1, 2, 3, 4]);
            for e in or_default(&args.m, &[4, 6, 8, 10, 12, 14]) {
                for &n in &ns {
                    let v = (e / 2 + 1).max(3);
                    let game: CongestionGame<Rational> = random_dag(v, e, n, seed)?;
                    let edges = contract_network(game.network())?.contracted().num_edges();
                    let mut oracle = CongestionOracle::new(game.clone());
                    let sol = learn_and_solve(&mut oracle)?;
                    let total = multiset_count(game.network().enumerate_paths().len(), n);
                    rows.push(Row {
                        family: "dag",
                        n,
                        m: edges,
                        k: game.network().enumerate_paths().len(),
                        d: 0,
                        seed,
                        queries_used: sol.queries_used,
                        bound: (edges * n).to_string(),
                        exhaustive: total.to_string(),
                        fraction: fraction(sol.queries_used, total),
                    });
                }
            }
        }
        Family::Graphical => {
            for n in or_default(&args.n, &[6]) {
                for k in or_default(&args.k, &[2]) {
                    for d in or_default(&args.d, &[1]) {
                        let game = random_graphical::<Rational>(n, k, d, seed)?;
                        let mut oracle = PurePayoffOracle::new(game);
                        let learned = learn_graphical(&mut oracle, d)?;
                        let total = (k as u128).saturating_pow(n as u32);
                        rows.push(Row {
                            family: "graphical",
                            n,
                            m: 0,
                            k,
                            d,
                            seed,
                            queries_used: learned.queries_used,
                            bound: probe_set_size(n, k, d).to_string(),
                            exhaustive: total.to_string(),
                            fraction: fraction(learned.queries_used, total),
                        });
                    }
                }
            }
        }
        Family::Bimatrix => {
            for k in or_default(&args.k, &[2, 4, 8, 10, 16]) {
                let game = random_bimatrix::<Rational>(k, k, seed)?;
                let mut oracle = PurePayoffOracle::new(game);
                let res = half_approx_ne(&mut oracle)?;
                let total = (k * k) as u128;
                rows.push(Row {
                    family: "bimatrix",
                    n: 2,
                    m: 0,
                    k,
                    d: 0,
                    seed,
                    queries_used: res.queries_used,
                    bound: (2 * k - 1).to_string(),
                    exhaustive: total.to_string(),
                    fraction: fraction(res.queries_used, total),
                });
            }
        }
    }
    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
