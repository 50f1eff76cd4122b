//! Exhaustive search over injective placements, pruned with lower bounds.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Cdcg;
use crate::mesh::{Mesh, Tile};
use crate::units::Energy;

use super::{Evaluation, Evaluator, Objective, SearchResult};

/// Largest number of complete placements the search agrees to consider.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000_000;

/// Number of injective placements of `cores` cores onto `tiles` tiles, or
/// `None` if it does not fit in a `u128`.
pub fn candidate_count(tiles: u64, cores: u64) -> Option<u128> {
    if cores > tiles {
        return Some(0);
    }
    (tiles - cores + 1..=tiles).try_fold(1u128, |acc, k| acc.checked_mul(k as u128))
}

/// `n!/(n-m)!` in scientific notation, for counts beyond `u128`.
fn approximate_count(tiles: u64, cores: u64) -> String {
    let log10: f64 = (tiles - cores + 1..=tiles).map(|k| (k as f64).log10()).sum();
    let exp = log10.floor();
    format!("about {:.2}e{}", 10f64.powf(log10 - exp), exp as u64)
}

pub fn exhaustive_search(objective: &Objective, app: &Cdcg, mesh: &Mesh) -> Result<SearchResult> {
    exhaustive_search_with_limit(objective, app, mesh, DEFAULT_ENUMERATION_LIMIT)
}

/// Returns an optimal mapping; among equal-cost optima, the one whose tiles
/// (listed in core-id order) are lexicographically smallest.
pub fn exhaustive_search_with_limit(
    objective: &Objective,
    app: &Cdcg,
    mesh: &Mesh,
    limit: u128,
) -> Result<SearchResult> {
    let started = Instant::now();
    objective.params.validate()?;
    let ev = Evaluator::new(objective, app, mesh)?;
    let (n, m) = (ev.tiles(), ev.cores());
    if m > n {
        return Err(Error::TooManyCores { cores: m, tiles: n });
    }
    match candidate_count(n as u64, m as u64) {
        Some(c) if c <= limit => {}
        c => {
            let candidates = c.map_or_else(|| approximate_count(n as u64, m as u64), |c| c.to_string());
            return Err(Error::InstanceTooLarge { candidates, limit });
        }
    }

    let mut dfs = Dfs {
        ev: &ev,
        partial: vec![None; m],
        used: vec![false; n],
        best: None,
        evaluations: 0,
    };
    dfs.descend(0);
    let (tiles, eval) = dfs.best.expect("at least one placement exists");
    Ok(SearchResult {
        model: objective.model,
        best_mapping: ev.mapping(&tiles),
        best_cost: eval.cost,
        best_texec: eval.texec,
        initial_cost: None,
        evaluations: dfs.evaluations,
        wall_time: started.elapsed(),
        history: Vec::new(),
    })
}

struct Dfs<'a> {
    ev: &'a Evaluator,
    partial: Vec<Option<Tile>>,
    used: Vec<bool>,
    best: Option<(Vec<Tile>, Evaluation)>,
    evaluations: u64,
}

impl Dfs<'_> {
    fn best_cost(&self) -> Option<Energy> {
        self.best.as_ref().map(|(_, e)| e.cost)
    }

    fn descend(&mut self, core: usize) {
        if core == self.partial.len() {
            let tiles: Vec<Tile> = self.partial.iter().map(|t| t.expect("complete")).collect();
            let eval = self.ev.cost(&tiles);
            self.evaluations += 1;
            // leaves come in lexicographic order, so only strict improvements
            // replace the incumbent
            if self.best_cost().is_none_or(|b| eval.cost < b) {
                self.best = Some((tiles, eval));
            }
            return;
        }
        for slot in 0..self.used.len() {
            if self.used[slot] {
                continue;
            }
            self.used[slot] = true;
            self.partial[core] = Some(Tile(slot as u32 + 1));
            // everything below is lexicographically after the incumbent, so
            // a bound that only ties it is enough to prune
            let prune = core + 1 < self.partial.len()
                && self.best_cost().is_some_and(|b| self.ev.lower_bound(&self.partial) >= b);
            if !prune {
                self.descend(core + 1);
            }
            self.partial[core] = None;
            self.used[slot] = false;
        }
    }
}

/// Plain enumeration without pruning, kept as a reference for tests.
#[cfg(test)]
pub(crate) fn brute_force(objective: &Objective, app: &Cdcg, mesh: &Mesh) -> (Vec<Tile>, Evaluation) {
    let ev = Evaluator::new(objective, app, mesh).unwrap();
    let (n, m) = (ev.tiles(), ev.cores());
    let mut best: Option<(Vec<Tile>, Evaluation)> = None;
    let mut stack = vec![(Vec::<Tile>::new())];
    // explicit stack, children pushed in reverse so they pop in order
    while let Some(prefix) = stack.pop() {
        if prefix.len() == m {
            let e = ev.cost(&prefix);
            if best.as_ref().is_none_or(|(_, b)| e.cost < b.cost) {
                best = Some((prefix, e));
            }
            continue;
        }
        for t in (1..=n as u32).rev().map(Tile) {
            if !prefix.contains(&t) {
                let mut next = prefix.clone();
                next.push(t);
                stack.push(next);
            }
        }
    }
    best.unwrap()
}
