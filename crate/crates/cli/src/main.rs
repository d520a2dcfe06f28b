use std::fs::File;
use std::io::BufWriter;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pqlab::bimatrix_algos::{half_approx_ne, uniform_profile};
use pqlab::dag::{learn_and_solve, preprocess_contract, ContractionMap};
use pqlab::format::{AnyGame, AnyProfile};
use pqlab::game::{regret, CongestionGame, GraphicalGame, MixedProfile, Network, StrategyProfile};
use pqlab::graphical_learner::{learn_graphical, probe_set_size};
use pqlab::oracle::{step_game, Adversary, CongestionOracle, PurePayoffOracle};
use pqlab::parallel_links::{query_bound, solve_parallel_links, ParallelLinksResult};
use pqlab::verify::{brute_force_cap, check_equivalence, deviation_report, is_link_equilibrium, EquivalenceMode};
use pqlab::{Error, Rational, Scalar};

mod bench;
mod source;

use source::{invalid, load, GenSpec};

#[derive(Parser)]
#[command(name = "pqlab", version, about = "Payoff-query equilibrium experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated game as JSON
    Gen(GenArgs),
    /// Find an (approximate) equilibrium through a query oracle
    Solve {
        #[arg(value_enum)]
        class: SolveClass,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Learn a hidden game through a query oracle
    Learn {
        #[arg(value_enum)]
        class: LearnClass,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a profile against a game
    Verify(VerifyArgs),
    /// Sweep instance sizes and write query counts as CSV
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveClass {
    Bimatrix,
    ParallelLinks,
    Dag,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnClass {
    Graphical,
    Dag,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    HalfNe,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    gen: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Game JSON file
    #[arg(long, alias = "file")]
    game: Option<PathBuf>,
    /// Generator spec, e.g. `dag:v=6,e=10,n=3`
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "half-ne")]
    algo: Algo,
    #[arg(long)]
    players: Option<usize>,
    #[arg(long)]
    kf: Option<usize>,
    /// In-degree bound promised to the graphical learner
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Run parallel links against the adaptive two-link adversary
    #[arg(long)]
    adversary: bool,
    /// Write the query transcript as JSON lines
    #[arg(long)]
    emit_trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    verify_mode: VerifyMode,
    /// Profiles drawn in sampled verification
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Leave wall time out of the result so reruns are byte-identical
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, alias = "file")]
    game: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    /// Largest regret accepted for mixed profiles
    #[arg(long, default_value = "0")]
    epsilon: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of a verified run; `ok = false` maps to exit code 2.
struct Report {
    body: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 4;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExhausted { .. }) => 3,
        Some(
            Error::InvalidGame(_)
            | Error::InvalidProfile(_)
            | Error::InvalidSpec(_)
            | Error::LoadOutOfRange { .. }
            | Error::NotADag
            | Error::Parse(_)
            | Error::TooLarge { .. },
        ) => 4,
        Some(_) => 2,
        None => 1,
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen(args) => {
            let game = source::generate(&GenSpec::parse(&args.gen)?, args.seed)?;
            write_out(args.out.as_deref(), &game.to_json())?;
            Ok(true)
        }
        Command::Solve { class, run } => timed(&run, |r| match class {
            SolveClass::Bimatrix => solve_bimatrix(r),
            SolveClass::ParallelLinks => solve_links(r),
            SolveClass::Dag => dag(r, "solve dag"),
        }),
        Command::Learn { class, run } => timed(&run, |r| match class {
            LearnClass::Graphical => learn_graphical_game(r),
            LearnClass::Dag => dag(r, "learn dag"),
        }),
        Command::Verify(args) => {
            let mut report = verify_profile(&args)?;
            report.body["command"] = json!("verify");
            report.body["verdict"] = json!(if report.ok { "equilibrium" } else { "not-equilibrium" });
            write_out(args.out.as_deref(), &pretty(&report.body))?;
            Ok(report.ok)
        }
        Command::Bench(args) => {
            bench::run(&args)?;
            Ok(true)
        }
    }
}

fn timed(run: &RunArgs, body: impl FnOnce(&RunArgs) -> Result<Report>) -> Result<bool> {
    let start = Instant::now();
    let mut report = body(run)?;
    if !run.no_timing {
        report.body["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    write_out(run.out.as_deref(), &pretty(&report.body))?;
    Ok(report.ok)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn write_out(path: Option<&FsPath>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn trace_file(path: Option<&FsPath>) -> Result<Option<BufWriter<File>>> {
    path.map(|p| File::create(p).map(BufWriter::new).with_context(|| format!("creating {}", p.display()))).transpose()
}

fn text(v: &Rational) -> Value {
    Value::String(v.to_text())
}

fn load_game(r: &RunArgs) -> Result<AnyGame<Rational>> {
    load(r.game.as_deref(), r.gen.as_deref(), r.seed)
}

fn congestion(r: &RunArgs) -> Result<CongestionGame<Rational>> {
    match load_game(r)? {
        AnyGame::Congestion(g) => with_players(g, r.players),
        _ => Err(invalid("expected a congestion game")),
    }
}

/// The same game restricted to fewer players.
fn with_players(game: CongestionGame<Rational>, players: Option<usize>) -> Result<CongestionGame<Rational>> {
    match players {
        None => Ok(game),
        Some(p) if p == game.players() => Ok(game),
        Some(p) if p < game.players() => {
            let tables = game.cost_tables().iter().map(|t| t[..=p].to_vec()).collect();
            Ok(CongestionGame::new(game.network().clone(), p, tables)?)
        }
        Some(p) => Err(invalid(format!("cost tables cover {} players, not {p}", game.players()))),
    }
}

fn solve_bimatrix(r: &RunArgs) -> Result<Report> {
    let AnyGame::Bimatrix(game) = load_game(r)? else {
        return Err(invalid("expected a bimatrix game"));
    };
    let (profile, queries, trace, bound) = match r.algo {
        Algo::HalfNe => {
            let mut oracle = PurePayoffOracle::with_budget(game.clone(), r.budget);
            let res = half_approx_ne(&mut oracle)?;
            if let Some(mut w) = trace_file(r.emit_trace.as_deref())? {
                oracle.ledger().write_jsonl(&mut w)?;
            }
            let (s1, s2, s3) = res.trace;
            (res.profile, res.queries_used, json!({ "s1": s1, "s2": s2, "s3": s3 }), Rational::new(1, 2))
        }
        Algo::Uniform => {
            let k = game.rows().max(game.cols()) as i64;
            (uniform_profile(game.rows(), game.cols()), 0, Value::Null, Rational::new(k - 1, k))
        }
    };
    let reg = regret(&game, &profile)?;
    let ok = reg <= bound;
    let body = json!({
        "command": "solve bimatrix",
        "algo": match r.algo { Algo::HalfNe => "half-ne", Algo::Uniform => "uniform" },
        "profile": AnyProfile::Mixed(profile).to_file(),
        "trace": trace,
        "queries_used": queries,
        "regret": text(&reg),
        "bound": text(&bound),
        "verdict": if ok { "verified" } else { "failed" },
    });
    Ok(Report { body, ok })
}

fn phases_json(res: &ParallelLinksResult) -> Value {
    res.phases
        .iter()
        .map(|p| {
            json!({
                "t": p.t, "delta": p.delta, "loads": p.loads,
                "moved_in": p.moved_in, "moved_out": p.moved_out, "queries": p.queries,
            })
        })
        .collect()
}

fn solve_links(r: &RunArgs) -> Result<Report> {
    if r.adversary {
        let n = match (&r.gen, r.players) {
            (_, Some(n)) => n,
            (Some(spec), None) => GenSpec::parse(spec)?.require("n")?,
            (None, None) => return Err(invalid("the adversary needs --players or --gen with n=")),
        };
        let mut adversary = Adversary::<Rational>::with_budget(n, r.budget)?;
        let res = solve_parallel_links(&mut adversary, r.kf)?;
        if let Some(mut w) = trace_file(r.emit_trace.as_deref())? {
            adversary.ledger().write_jsonl(&mut w)?;
        }
        let completions = adversary.consistent_completions();
        // the output must be an equilibrium of every game still consistent
        let checked = spread(&completions, 64);
        let mut ok = true;
        for &loc in &checked {
            let game = step_game::<Rational>(n, loc)?;
            ok &= is_link_equilibrium(game.link_tables().expect("two links"), &res.loads);
        }
        let body = json!({
            "command": "solve parallel-links",
            "adversary": { "lower": adversary.lower(), "upper": adversary.upper(),
                           "consistent_completions": completions.len(), "checked": checked },
            "loads": res.loads,
            "special_link": res.special_link,
            "kf": res.kf,
            "queries_used": res.queries_used,
            "bound": query_bound(2, n, res.kf),
            "phases": phases_json(&res),
            "verdict": if ok { "verified" } else { "failed" },
        });
        return Ok(Report { body, ok });
    }
    let game = congestion(r)?;
    let tables = game.link_tables().ok_or_else(|| invalid("expected a parallel-links network"))?.to_vec();
    let mut oracle = CongestionOracle::with_budget(game.clone(), r.budget);
    let res = solve_parallel_links(&mut oracle, r.kf)?;
    if let Some(mut w) = trace_file(r.emit_trace.as_deref())? {
        oracle.ledger().write_jsonl(&mut w)?;
    }
    let ok = is_link_equilibrium(&tables, &res.loads);
    let body = json!({
        "command": "solve parallel-links",
        "loads": res.loads,
        "special_link": res.special_link,
        "kf": res.kf,
        "queries_used": res.queries_used,
        "bound": query_bound(tables.len(), game.players(), res.kf),
        "phases": phases_json(&res),
        "verdict": if ok { "verified" } else { "failed" },
    });
    Ok(Report { body, ok })
}

/// At most `limit` entries, evenly spread and including both ends.
fn spread(items: &[usize], limit: usize) -> Vec<usize> {
    if items.len() <= limit {
        return items.to_vec();
    }
    let mut out: Vec<usize> = (0..limit).map(|i| items[i * (items.len() - 1) / (limit - 1)]).collect();
    out.dedup();
    out
}

fn network_json(net: &Network) -> Value {
    json!({
        "vertices": net.num_vertices(), "origin": net.origin(), "dest": net.dest(),
        "edges": net.arcs().iter().map(|(t, h)| [*t, *h]).collect::<Vec<_>>(),
    })
}

fn contraction_json(map: &ContractionMap) -> Value {
    json!({
        "network": network_json(map.contracted()),
        "absorbed": (0..map.contracted().num_edges()).map(|e| map.absorbed(e).to_vec()).collect::<Vec<_>>(),
    })
}

fn profile_json(p: &StrategyProfile) -> Value {
    serde_json::to_value(AnyProfile::<Rational>::Congestion(p.clone()).to_file()).expect("profiles serialize")
}

fn dag(r: &RunArgs, command: &str) -> Result<Report> {
    let game = congestion(r)?;
    let mut oracle = CongestionOracle::with_budget(game.clone(), r.budget);
    let sol = learn_and_solve(&mut oracle)?;
    if let Some(mut w) = trace_file(r.emit_trace.as_deref())? {
        oracle.ledger().write_jsonl(&mut w)?;
    }
    let learned = sol
        .learned
        .costs
        .tables()
        .ok_or_else(|| anyhow!(Error::AlgorithmInvariantViolated("learned costs incomplete".into())))?;
    let (reduced, _) = preprocess_contract(&game)?;
    let mode = match r.verify_mode {
        VerifyMode::Exhaustive => EquivalenceMode::Exhaustive,
        VerifyMode::Sampled => EquivalenceMode::Sampled { samples: r.samples, seed: r.seed.unwrap_or(0) },
    };
    let cex = check_equivalence(&learned, reduced.cost_tables(), reduced.network(), game.players(), mode)?;
    let deviation = deviation_report(&game, &sol.profile)?;
    let (equivalent, equilibrium) = (cex.is_none(), deviation.is_equilibrium());
    let learning = command.starts_with("learn");
    let ok = equivalent && equilibrium;
    let verdict = match (learning, ok) {
        (true, true) => "equivalent",
        (true, false) => "not-equivalent",
        (false, true) => "equilibrium",
        (false, false) => "not-equilibrium",
    };
    let body = json!({
        "command": command,
        "players": game.players(),
        "edges": game.network().num_edges(),
        "contracted_edges": sol.map.contracted().num_edges(),
        "queries_used": sol.queries_used,
        "contraction": contraction_json(&sol.map),
        "learned_costs": learned.iter().map(|t| t.iter().map(text).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "profile": profile_json(&sol.profile),
        "equivalent": equivalent,
        "counterexample": cex.map(|c| json!({
            "profile": profile_json(&c.profile), "path": c.path.0, "learned": text(&c.ours), "hidden": text(&c.truth),
        })),
        "improvement": text(&deviation.improvement),
        "verdict": verdict,
    });
    Ok(Report { body, ok })
}

/// Every profile of the game in the order of a mixed-radix counter, or a
/// seeded sample when there are more than the cap.
fn graphical_profiles(g: &GraphicalGame<Rational>, mode: VerifyMode, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let (n, k) = (g.players(), g.strategies());
    let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if matches!(mode, VerifyMode::Exhaustive) && total <= brute_force_cap() {
        return (0..total as usize)
            .map(|mut i| {
                (0..n)
                    .map(|_| {
                        let s = i % k;
                        i /= k;
                        s
                    })
                    .collect()
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| (0..n).map(|_| rng.gen_range(0..k)).collect()).collect()
}

fn learn_graphical_game(r: &RunArgs) -> Result<Report> {
    let AnyGame::Graphical(game) = load_game(r)? else {
        return Err(invalid("expected a graphical game"));
    };
    let degree = match (r.degree, &r.gen) {
        (Some(d), _) => d,
        (None, Some(spec)) => GenSpec::parse(spec)?.usize_or("d", 1)?,
        (None, None) => return Err(invalid("learning from a file needs --degree")),
    };
    let mut oracle = PurePayoffOracle::with_budget(game.clone(), r.budget);
    let learned = learn_graphical(&mut oracle, degree)?;
    if let Some(mut w) = trace_file(r.emit_trace.as_deref())? {
        oracle.ledger().write_jsonl(&mut w)?;
    }
    let mut mismatch = None;
    'scan: for s in graphical_profiles(&game, r.verify_mode, r.samples, r.seed.unwrap_or(0)) {
        for p in 0..game.players() {
            if game.payoff(p, &s)? != learned.game.payoff(p, &s)? {
                mismatch = Some(json!({ "profile": s, "player": p }));
                break 'scan;
            }
        }
    }
    let ok = mismatch.is_none();
    let body = json!({
        "command": "learn graphical",
        "degree": degree,
        "learned": AnyGame::Graphical(learned.game.clone()).to_file(),
        "affects_edges": learned.affects_edges.iter().map(|(q, p)| [*q, *p]).collect::<Vec<_>>(),
        "queries_used": learned.queries_used,
        "probe_set_size": probe_set_size(game.players(), game.strategies(), degree).to_string(),
        "mismatch": mismatch,
        "verdict": if ok { "equal" } else { "mismatch" },
    });
    Ok(Report { body, ok })
}

fn verify_profile(args: &VerifyArgs) -> Result<Report> {
    let game = source::read_game(&args.game)?;
    let text_in =
        std::fs::read_to_string(&args.profile).with_context(|| format!("reading {}", args.profile.display()))?;
    let profile = AnyProfile::<Rational>::from_json(&text_in)?;
    match (game, profile) {
        (AnyGame::Congestion(g), AnyProfile::Congestion(p)) => {
            let rep = deviation_report(&g, &p)?;
            let ok = rep.is_equilibrium();
            let body = json!({
                "profile": profile_json(&rep.profile),
                "player": rep.player.map(|p| p.0),
                "alternative": rep.alternative.map(|p| p.0),
                "improvement": text(&rep.improvement),
                "equilibrium": ok,
            });
            Ok(Report { body, ok })
        }
        (AnyGame::Bimatrix(g), prof @ (AnyProfile::Mixed(_) | AnyProfile::Pure(_))) => {
            let mixed = match prof {
                AnyProfile::Mixed(m) => m,
                AnyProfile::Pure(s) if s.len() == 2 && s[0] < g.rows() && s[1] < g.cols() => {
                    MixedProfile::pure(g.rows(), g.cols(), s[0], s[1])
                }
                _ => return Err(anyhow!(Error::InvalidProfile("need two strategies in range".into()))),
            };
            let eps = Rational::parse_text(&args.epsilon).ok_or_else(|| invalid("bad --epsilon"))?;
            let reg = regret(&g, &mixed)?;
            let ok = reg <= eps;
            Ok(Report { body: json!({ "regret": text(&reg), "epsilon": text(&eps), "equilibrium": ok }), ok })
        }
        (AnyGame::Graphical(g), AnyProfile::Pure(s)) => {
            let mut best: Option<(usize, usize, Rational)> = None;
            for p in 0..g.players() {
                let own = g.payoff(p, &s)?;
                for alt in 0..g.strategies() {
                    let mut t = s.clone();
                    t[p] = alt;
                    let gain = g.payoff(p, &t)? - own;
                    if best.as_ref().is_none_or(|b| gain > b.2) {
                        best = Some((p, alt, gain));
                    }
                }
            }
            let (player, alternative, gain) = best.ok_or_else(|| invalid("empty game"))?;
            let ok = gain <= Rational::from_integer(0);
            let body =
                json!({ "player": player, "alternative": alternative, "improvement": text(&gain), "equilibrium": ok });
            Ok(Report { body, ok })
        }
        _ => Err(invalid("profile type does not match the game")),
    }
}
