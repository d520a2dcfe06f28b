//! Pure equilibria of a game given by a learned cost function.

use crate::error::{Error, Result};
use crate::game::{Network, Path, StrategyProfile};
use crate::scalar::Scalar;

use super::learner::PartialCostFunction;

/// Cheapest o-d path when edge `e` costs `weight(e)`; weights may be
/// negative. Ties go to the lowest edge id at each step.
pub fn cheapest_path<S: Scalar>(net: &Network, weight: impl Fn(usize) -> S) -> Path {
    let mut dist: Vec<Option<S>> = vec![None; net.num_vertices()];
    let mut choice = vec![usize::MAX; net.num_vertices()];
    dist[net.dest()] = Some(S::zero());
    for &v in net.topological_order().iter().rev() {
        let mut outs = net.out_edges(v).to_vec();
        outs.sort_unstable();
        for e in outs {
            if let Some(rest) = &dist[net.edge(e).head] {
                let total = weight(e) + rest.clone();
                if dist[v].as_ref().is_none_or(|best| total < *best) {
                    dist[v] = Some(total);
                    choice[v] = e;
                }
            }
        }
    }
    let mut path = Vec::new();
    let mut at = net.origin();
    while at != net.dest() {
        path.push(choice[at]);
        at = net.edge(choice[at]).head;
    }
    Path(path)
}

fn potential<S: Scalar>(f: &PartialCostFunction<S>, loads: &[usize]) -> Result<S> {
    let mut total = S::zero();
    for (e, &l) in loads.iter().enumerate() {
        for j in 1..=l {
            total = total + f.value(e, j)?;
        }
    }
    Ok(total)
}

/// A pure Nash equilibrium of the `players`-player game with costs `f`.
///
/// Players are inserted one at a time on a best response, then single
/// players move to strictly better paths until nobody can improve. Every
/// move must lower the Rosenthal potential; `max_steps` bounds the moves.
pub fn solve_learned_game<S: Scalar>(
    f: &PartialCostFunction<S>,
    net: &Network,
    players: usize,
    max_steps: usize,
) -> Result<StrategyProfile> {
    if !f.is_total() || f.num_edges() != net.num_edges() || f.players() != players {
        return Err(Error::InvalidGame("cost function must be total on this network".into()));
    }
    let mut loads = vec![0usize; net.num_edges()];
    let mut profile: Vec<(usize, Path)> = Vec::new();
    for _ in 0..players {
        let p = cheapest_path(net, |e| f.get(e, loads[e] + 1).cloned().unwrap_or_else(S::zero));
        for &e in p.edges() {
            loads[e] += 1;
        }
        profile.push((1, p));
    }
    let mut current = StrategyProfile::new(profile);

    let mut phi = potential(f, &loads)?;
    let mut steps = 0;
    'outer: loop {
        for (_, from) in current.entries().to_vec() {
            let own = f.path_cost(&from, &loads)?;
            let reply = cheapest_path(net, |e| {
                let l = loads[e] - usize::from(from.contains(e)) + 1;
                f.get(e, l).cloned().unwrap_or_else(S::zero)
            });
            let mut next = loads.clone();
            for &e in from.edges() {
                next[e] -= 1;
            }
            for &e in reply.edges() {
                next[e] += 1;
            }
            let moved = f.path_cost(&reply, &next)?;
            if !(moved < own) {
                continue;
            }
            steps += 1;
            let next_phi = potential(f, &next)?;
            if !(next_phi < phi) || steps > max_steps {
                return Err(Error::PotentialNotDecreasing { steps });
            }
            let mut entries: Vec<(usize, Path)> = current.entries().to_vec();
            entries.push((1, reply));
            let idx = entries.iter().position(|(_, p)| *p == from).expect("mover is in the profile");
            entries[idx].0 -= 1;
            current = StrategyProfile::new(entries);
            loads = next;
            phi = next_phi;
            continue 'outer;
        }
        return Ok(current);
    }
}
