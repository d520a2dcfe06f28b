//! Exact pure equilibria on parallel links with few congestion queries.
//!
//! Players start together on the link that is cheapest at full load and
//! are then spread out in phases: the phase with group size `δ = kf^t`
//! turns a `kf·δ`-equilibrium into a `δ`-equilibrium by moving whole
//! groups of `δ` players, ending with `δ = 1`, an exact equilibrium.
//!
//! A phase chooses the number `j` of groups to move by an exchange
//! argument. Let `Q` be the costs of inserting the next `1..=2kf` groups on
//! each link, ascending, and `R` the costs of the groups currently on each
//! link, descending. Moving the `j` costliest groups onto the `j` cheapest
//! insertion slots yields a `δ`-equilibrium exactly when `j` is the largest
//! index with `R_(j) > Q_(j)`. The per-link parts of `R` are sorted by load,
//! so counting the groups above a threshold is a binary search per link,
//! and all links search in parallel with one query per round.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::LoadAssignment;
use crate::oracle::CongestionQueries;
use crate::scalar::{cmp, Scalar};

/// Whether `loads` is a `δ`-equilibrium with special link `a` for the cost
/// tables `tables[i][load]`. Loads above the player count cost +∞.
pub fn is_delta_equilibrium<S: Scalar>(tables: &[Vec<S>], loads: &[usize], delta: usize, a: usize) -> bool {
    if delta == 0 || tables.len() != loads.len() {
        return false;
    }
    if loads.iter().enumerate().any(|(i, &l)| i != a && l % delta != 0) {
        return false;
    }
    for (i, &li) in loads.iter().enumerate() {
        if li < delta {
            continue;
        }
        for (j, &lj) in loads.iter().enumerate() {
            if let Some(target) = tables[j].get(lj + delta) {
                if tables[i][li] > *target {
                    return false;
                }
            }
        }
    }
    true
}

/// Default group factor `max(2, ⌈log₂ m⌉)`.
pub fn default_kf(m: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < m {
        bits += 1;
    }
    bits.max(2)
}

/// Largest `T` with `kf^T ≤ n`.
pub fn top_exponent(n: usize, kf: usize) -> u32 {
    let mut t = 0;
    let mut power = 1usize;
    while let Some(next) = power.checked_mul(kf) {
        if next > n {
            break;
        }
        power = next;
        t += 1;
    }
    t
}

fn ceil_log2(x: usize) -> usize {
    let mut bits = 0;
    while (1u128 << bits) < x as u128 {
        bits += 1;
    }
    bits
}

/// Upper bound on the queries of [`solve_parallel_links`]:
/// `1 + (T+1)(L+1)(2kf + 1 + L + 1)` with `L = ⌈log₂(kf·m + 1)⌉`.
pub fn query_bound(m: usize, n: usize, kf: usize) -> usize {
    let t = top_exponent(n.max(1), kf) as usize;
    let l = ceil_log2(kf * m + 1);
    1 + (t + 1) * (l + 1) * (2 * kf + 1 + l + 1)
}

/// Per-link cost probes with a cache over `(link, load)`. Every call to
/// [`LinkProber::fetch`] costs at most one query however many links it
/// probes, because loads on distinct links are applied simultaneously.
pub struct LinkProber<S: Scalar, O: CongestionQueries<S>> {
    oracle: O,
    links: usize,
    players: usize,
    cache: HashMap<(usize, usize), S>,
}

impl<S: Scalar, O: CongestionQueries<S>> LinkProber<S, O> {
    pub fn new(oracle: O) -> Result<Self> {
        let net = oracle.network();
        if !net.is_parallel_links() {
            return Err(Error::InvalidSpec("oracle is not a parallel-links game".into()));
        }
        let links = net.num_edges();
        let players = oracle.players();
        Ok(Self { oracle, links, players, cache: HashMap::new() })
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn queries_used(&self) -> usize {
        self.oracle.queries_used()
    }

    pub fn into_inner(self) -> O {
        self.oracle
    }

    pub fn cached(&self, link: usize, load: usize) -> Option<&S> {
        self.cache.get(&(link, load))
    }

    /// Makes `f_link(load)` available for every request, issuing one query
    /// for the uncached ones. At most one load per link.
    pub fn fetch(&mut self, requests: &[(usize, usize)]) -> Result<()> {
        let mut loads = vec![0usize; self.links];
        let mut any = false;
        for &(link, load) in requests {
            if load == 0 || load > self.players {
                return Err(Error::AlgorithmInvariantViolated(format!("probe of link {link} at load {load}")));
            }
            if self.cache.contains_key(&(link, load)) {
                continue;
            }
            if loads[link] != 0 && loads[link] != load {
                return Err(Error::AlgorithmInvariantViolated(format!("two loads on link {link} in one query")));
            }
            loads[link] = load;
            any = true;
        }
        if !any {
            return Ok(());
        }
        let answer = self.oracle.query_loads(&LoadAssignment::links(&loads))?;
        for (path, cost) in answer {
            let link = path.edges()[0];
            self.cache.insert((link, loads[link]), cost);
        }
        Ok(())
    }

    fn value(&self, link: usize, load: usize) -> S {
        self.cache[&(link, load)].clone()
    }
}

/// Instrumentation of one phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    pub t: u32,
    pub delta: usize,
    /// Loads after the phase.
    pub loads: Vec<usize>,
    /// Groups of `delta` players moved onto each link.
    pub moved_in: Vec<usize>,
    /// Groups of `delta` players moved off each link.
    pub moved_out: Vec<usize>,
    pub queries: usize,
}

impl PhaseRecord {
    pub fn groups_moved(&self) -> usize {
        self.moved_in.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelLinksResult {
    pub loads: Vec<usize>,
    pub special_link: usize,
    pub kf: usize,
    pub queries_used: usize,
    pub phases: Vec<PhaseRecord>,
}

/// Pure equilibrium of a parallel-links game behind `oracle`.
/// `kf` defaults to [`default_kf`]; it must be at least 2.
pub fn solve_parallel_links<S, O>(oracle: O, kf: Option<usize>) -> Result<ParallelLinksResult>
where
    S: Scalar,
    O: CongestionQueries<S>,
{
    let mut prober = LinkProber::new(oracle)?;
    let m = prober.links();
    let n = prober.players();
    let kf = kf.unwrap_or_else(|| default_kf(m));
    if kf < 2 {
        return Err(Error::InvalidSpec(format!("group factor must be at least 2, got {kf}")));
    }
    if m == 0 {
        return Err(Error::InvalidSpec("no links".into()));
    }
    let start = prober.queries_used();
    let mut loads = vec![0; m];
    if n == 0 {
        return Ok(ParallelLinksResult { loads, special_link: 0, kf, queries_used: 0, phases: Vec::new() });
    }

    let full: Vec<(usize, usize)> = (0..m).map(|i| (i, n)).collect();
    prober.fetch(&full)?;
    let mut a = 0;
    for i in 1..m {
        if prober.value(i, n) < prober.value(a, n) {
            a = i;
        }
    }
    loads[a] = n;

    let mut phases = Vec::new();
    for t in (0..=top_exponent(n, kf)).rev() {
        let delta = kf.pow(t);
        let before = prober.queries_used();
        let moves = refine_profile(&mut prober, &mut loads, delta, kf)?;
        phases.push(PhaseRecord {
            t,
            delta,
            loads: loads.clone(),
            moved_in: moves.moved_in,
            moved_out: moves.moved_out,
            queries: prober.queries_used() - before,
        });
    }
    Ok(ParallelLinksResult { loads, special_link: a, kf, queries_used: prober.queries_used() - start, phases })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moves {
    pub moved_in: Vec<usize>,
    pub moved_out: Vec<usize>,
}

/// Insertion slot: cost of adding the `r`-th group to `link`.
#[derive(Debug, Clone)]
struct Slot<S> {
    cost: S,
    link: usize,
    r: usize,
}

/// One refinement phase: turns a `kf·δ`-equilibrium into a
/// `δ`-equilibrium in place by moving groups of `delta` players. Only the
/// special link can hold a load that is not a multiple of `kf·δ`, and its
/// remainder below `delta` never moves.
pub fn refine_profile<S, O>(
    prober: &mut LinkProber<S, O>,
    loads: &mut [usize],
    delta: usize,
    kf: usize,
) -> Result<Moves>
where
    S: Scalar,
    O: CongestionQueries<S>,
{
    let m = loads.len();
    let n = prober.players();
    let mut phase = Phase { prober, loads, delta };

    // insertion costs f_i(n_i + rδ), one query per r covering all links
    for r in 1..=2 * kf {
        let req: Vec<(usize, usize)> =
            (0..m).map(|i| (i, phase.loads[i] + r * delta)).filter(|&(_, l)| l <= n).collect();
        phase.prober.fetch(&req)?;
    }
    let mut slots: Vec<Slot<S>> = Vec::new();
    for i in 0..m {
        for r in 1..=2 * kf {
            let load = phase.loads[i] + r * delta;
            if load <= n {
                slots.push(Slot { cost: phase.prober.value(i, load), link: i, r });
            }
        }
    }
    slots.sort_by(|x, y| cmp(&x.cost, &y.cost).then(x.link.cmp(&y.link)).then(x.r.cmp(&y.r)));

    let groups: usize = (0..m).map(|i| phase.groups(i)).sum();
    let reachable = groups.min(slots.len());
    let cap = reachable.min(kf * m);

    // last q in 1..=cap with #(R > Q_(q)) ≥ q; q = 0 holds vacuously
    let (mut lo, mut hi) = (0usize, cap);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if phase.holds(mid, &slots)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let j = lo;
    if j == cap && cap < reachable && phase.holds(cap + 1, &slots)? {
        return Err(Error::AlgorithmInvariantViolated(format!(
            "more than kf·m = {} group moves needed; costs are not monotone",
            kf * m
        )));
    }

    let mut moved_in = vec![0; m];
    let mut moved_out = vec![0; m];
    if j > 0 {
        // groups strictly above Q_(j+1) must all move
        let above: Vec<usize> = if j < slots.len() { phase.counts(&slots[j].cost, j + 1)? } else { vec![0; m] };
        let upto = phase.counts(&slots[j - 1].cost, j)?;
        let fixed: usize = above.iter().sum();
        if fixed > j || upto.iter().sum::<usize>() < j {
            return Err(Error::AlgorithmInvariantViolated("exchange counts inconsistent".into()));
        }
        let band: Vec<(usize, usize)> = (0..m).map(|i| (above[i], upto[i])).collect();
        let extra = phase.select_top(band, j - fixed)?;
        for i in 0..m {
            moved_out[i] = above[i] + extra[i];
        }
        for s in &slots[..j] {
            moved_in[s.link] += 1;
        }
        if let Some(i) = (0..m).find(|&i| moved_in[i] > 0 && moved_out[i] > 0) {
            return Err(Error::AlgorithmInvariantViolated(format!("link {i} both gains and loses groups")));
        }
        for i in 0..m {
            phase.loads[i] = phase.loads[i] + moved_in[i] * delta - moved_out[i] * delta;
        }
    }
    Ok(Moves { moved_in, moved_out })
}

struct Phase<'a, S: Scalar, O: CongestionQueries<S>> {
    prober: &'a mut LinkProber<S, O>,
    loads: &'a mut [usize],
    delta: usize,
}

impl<S: Scalar, O: CongestionQueries<S>> Phase<'_, S, O> {
    fn groups(&self, link: usize) -> usize {
        self.loads[link] / self.delta
    }

    /// Load of link `i` with its top `t` groups removed.
    fn removal_load(&self, link: usize, t: usize) -> usize {
        self.loads[link] - t * self.delta
    }

    fn holds(&mut self, q: usize, slots: &[Slot<S>]) -> Result<bool> {
        if q > slots.len() {
            return Ok(false);
        }
        let c = slots[q - 1].cost.clone();
        let counts = self.counts(&c, q)?;
        Ok(counts.iter().sum::<usize>() >= q)
    }

    /// Per link, the number of groups whose removal cost exceeds `c`,
    /// capped at `cap`.
    fn counts(&mut self, c: &S, cap: usize) -> Result<Vec<usize>> {
        let m = self.loads.len();
        let ranges: Vec<(usize, usize)> = (0..m).map(|i| (0, self.groups(i).min(cap))).collect();
        self.search(&ranges, c, Ordering::Greater)
    }

    /// For each link `i` and range `[lo, hi)` of group positions, the
    /// length of the prefix whose removal costs compare to `c` as `want`
    /// (`Greater` counts `> c`, `Equal` counts `≥ c`). All links advance
    /// together, one query per round.
    fn search(&mut self, ranges: &[(usize, usize)], c: &S, want: Ordering) -> Result<Vec<usize>> {
        let mut bounds: Vec<(usize, usize)> = ranges.to_vec();
        loop {
            let mut req = Vec::new();
            for (i, &(lo, hi)) in bounds.iter().enumerate() {
                if lo < hi {
                    req.push((i, self.removal_load(i, (lo + hi) / 2)));
                }
            }
            if req.is_empty() {
                return Ok(bounds.iter().zip(ranges).map(|(&(end, _), &(start, _))| end - start).collect());
            }
            self.prober.fetch(&req)?;
            for (i, (lo, hi)) in bounds.iter_mut().enumerate() {
                if *lo < *hi {
                    let mid = (*lo + *hi) / 2;
                    let v = self.prober.value(i, self.loads[i] - mid * self.delta);
                    let ok = match want {
                        Ordering::Greater => v > *c,
                        _ => v >= *c,
                    };
                    if ok {
                        *lo = mid + 1;
                    } else {
                        *hi = mid;
                    }
                }
            }
        }
    }

    /// Chooses the `need` costliest removal positions among the per-link
    /// bands `[lo_i, hi_i)`, returning how many come from each link.
    fn select_top(&mut self, mut band: Vec<(usize, usize)>, mut need: usize) -> Result<Vec<usize>> {
        let m = band.len();
        let mut taken = vec![0usize; m];
        while need > 0 {
            let width: usize = band.iter().map(|&(lo, hi)| hi - lo).sum();
            if width < need {
                return Err(Error::AlgorithmInvariantViolated("band narrower than demand".into()));
            }
            let active: Vec<usize> = (0..m).filter(|&i| band[i].0 < band[i].1).collect();
            if width == need {
                for i in active {
                    taken[i] += band[i].1 - band[i].0;
                }
                return Ok(taken);
            }
            if active.len() == 1 {
                taken[active[0]] += need;
                return Ok(taken);
            }
            if let Some(vals) = self.all_cached(&band) {
                let mut items: Vec<(S, usize, usize)> = vals;
                items.sort_by(|x, y| cmp(&y.0, &x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
                for (_, i, _) in items.into_iter().take(need) {
                    taken[i] += 1;
                }
                return Ok(taken);
            }

            // weighted median of the range midpoints as pivot
            let req: Vec<(usize, usize)> =
                active.iter().map(|&i| (i, self.removal_load(i, (band[i].0 + band[i].1) / 2))).collect();
            self.prober.fetch(&req)?;
            let mut mids: Vec<(S, usize)> = active
                .iter()
                .map(|&i| {
                    (self.prober.value(i, self.removal_load(i, (band[i].0 + band[i].1) / 2)), band[i].1 - band[i].0)
                })
                .collect();
            mids.sort_by(|x, y| cmp(&y.0, &x.0));
            let mut acc = 0;
            let mut pivot = mids[0].0.clone();
            for (v, w) in &mids {
                acc += w;
                pivot = v.clone();
                if 2 * acc >= width {
                    break;
                }
            }

            let greater = self.search(&band, &pivot, Ordering::Greater)?;
            let g: usize = greater.iter().sum();
            if g >= need {
                for i in 0..m {
                    band[i].1 = band[i].0 + greater[i];
                }
                continue;
            }
            let after_greater: Vec<(usize, usize)> = (0..m).map(|i| (band[i].0 + greater[i], band[i].1)).collect();
            let equal = self.search(&after_greater, &pivot, Ordering::Equal)?;
            let e: usize = equal.iter().sum();
            for i in 0..m {
                taken[i] += greater[i];
            }
            need -= g;
            if e >= need {
                for i in 0..m {
                    let take = equal[i].min(need);
                    taken[i] += take;
                    need -= take;
                }
                return Ok(taken);
            }
            for i in 0..m {
                taken[i] += equal[i];
                band[i].0 += greater[i] + equal[i];
            }
            need -= e;
        }
        Ok(taken)
    }

    fn all_cached(&self, band: &[(usize, usize)]) -> Option<Vec<(S, usize, usize)>> {
        let mut out = Vec::new();
        for (i, &(lo, hi)) in band.iter().enumerate() {
            for t in lo..hi {
                out.push((self.prober.cached(i, self.removal_load(i, t))?.clone(), i, t));
            }
        }
        Some(out)
    }
}
