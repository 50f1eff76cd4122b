//! Simulated annealing over injective placements.
//!
//! A move picks a core and a different tile uniformly at random; if the
//! tile is taken the two cores swap, otherwise the core relocates. Restarts
//! run in parallel with independent streams of one seeded generator, and
//! the result does not depend on how many threads are available. Each run
//! ends with a first-improvement descent from the best placement it saw.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Cdcg;
use crate::mapper::Model;
use crate::mesh::{Mesh, Tile};
use crate::units::Energy;

use super::{Evaluation, Evaluator, Objective, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialTemp {
    /// Chosen so that the average uphill move seen in a short random walk
    /// is accepted with probability `acceptance`.
    Auto { acceptance: f64, samples: usize },
    /// In attojoules.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub seed: u64,
    pub initial_temp: InitialTemp,
    /// Geometric cooling factor.
    pub alpha: f64,
    /// Moves per temperature; `None` means ten per tile.
    pub moves_per_temp: Option<usize>,
    /// Stop once the temperature falls below this fraction of the start.
    pub min_temp_ratio: f64,
    /// Stop after this many consecutive temperatures in which no accepted
    /// move changed the cost.
    pub plateau: usize,
    pub restarts: usize,
    /// Cap on cached evaluations per restart (timing-aware model only).
    pub cache_limit: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            seed: 1,
            initial_temp: InitialTemp::Auto { acceptance: 0.8, samples: 100 },
            alpha: 0.95,
            moves_per_temp: None,
            min_temp_ratio: 1e-4,
            plateau: 20,
            restarts: 12,
            cache_limit: 200_000,
        }
    }
}

impl SaParams {
    pub fn with_seed(seed: u64) -> Self {
        SaParams { seed, ..SaParams::default() }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("cooling factor must lie strictly between 0 and 1");
        }
        if !(self.min_temp_ratio > 0.0 && self.min_temp_ratio < 1.0) {
            return bad("minimum temperature ratio must lie strictly between 0 and 1");
        }
        if self.restarts == 0 {
            return bad("at least one restart is needed");
        }
        if self.moves_per_temp == Some(0) || self.plateau == 0 {
            return bad("moves per temperature and plateau length must be positive");
        }
        match self.initial_temp {
            InitialTemp::Auto { acceptance, samples } if !(acceptance > 0.0 && acceptance < 1.0) || samples == 0 => {
                bad("automatic start temperature needs 0 < acceptance < 1 and some samples")
            }
            InitialTemp::Fixed(t) if !(t.is_finite() && t > 0.0) => bad("start temperature must be positive"),
            _ => Ok(()),
        }
    }
}

pub fn simulated_annealing(objective: &Objective, app: &Cdcg, mesh: &Mesh, sa: &SaParams) -> Result<SearchResult> {
    let started = Instant::now();
    objective.params.validate()?;
    sa.validate()?;
    let ev = Evaluator::new(objective, app, mesh)?;
    if ev.cores() > ev.tiles() {
        return Err(Error::TooManyCores { cores: ev.cores(), tiles: ev.tiles() });
    }

    let runs: Vec<Run> = (0..sa.restarts).into_par_iter().map(|r| anneal(&ev, sa, r as u64)).collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.best.1.cost.aj().total_cmp(&b.best.1.cost.aj()))
        .expect("at least one restart");
    Ok(SearchResult {
        model: objective.model,
        best_mapping: ev.mapping(&best.best.0),
        best_cost: best.best.1.cost,
        best_texec: best.best.1.texec,
        initial_cost: Some(best.initial),
        evaluations,
        wall_time: started.elapsed(),
        history: best.history,
    })
}

struct Run {
    initial: Energy,
    best: (Vec<Tile>, Evaluation),
    evaluations: u64,
    history: Vec<Energy>,
}

/// Placement state: tile of each core plus the inverse table.
struct State {
    tiles: Vec<Tile>,
    occupant: Vec<Option<usize>>,
}

impl State {
    fn random(cores: usize, n_tiles: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut all: Vec<Tile> = (1..=n_tiles as u32).map(Tile).collect();
        all.shuffle(rng);
        Self::from_tiles(all[..cores].to_vec(), n_tiles)
    }

    fn from_tiles(tiles: Vec<Tile>, n_tiles: usize) -> Self {
        let mut occupant = vec![None; n_tiles];
        for (c, t) in tiles.iter().enumerate() {
            occupant[t.slot()] = Some(c);
        }
        State { tiles, occupant }
    }

    /// Applies a move and returns what undoes it.
    fn apply(&mut self, core: usize, to: Tile) -> (usize, Tile) {
        let from = self.tiles[core];
        if let Some(other) = self.occupant[to.slot()] {
            self.tiles[other] = from;
        }
        self.occupant[from.slot()] = self.occupant[to.slot()];
        self.occupant[to.slot()] = Some(core);
        self.tiles[core] = to;
        (core, from)
    }

    fn random_move(&self, rng: &mut ChaCha8Rng) -> (usize, Tile) {
        let core = rng.gen_range(0..self.tiles.len());
        let mut t = rng.gen_range(0..self.occupant.len() - 1);
        if t >= self.tiles[core].slot() {
            t += 1;
        }
        (core, Tile(t as u32 + 1))
    }
}

struct Costs<'a> {
    ev: &'a Evaluator,
    cache: Option<HashMap<Vec<Tile>, Evaluation>>,
    limit: usize,
    evaluations: u64,
}

impl Costs<'_> {
    fn get(&mut self, tiles: &[Tile]) -> Evaluation {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(tiles)) {
            return *hit;
        }
        let e = self.ev.cost(tiles);
        self.evaluations += 1;
        if let Some(cache) = &mut self.cache {
            if cache.len() >= self.limit {
                cache.clear();
            }
            cache.insert(tiles.to_vec(), e);
        }
        e
    }
}

fn anneal(ev: &Evaluator, sa: &SaParams, restart: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(sa.seed);
    rng.set_stream(restart);
    let (m, n) = (ev.cores(), ev.tiles());
    let mut costs = Costs {
        ev,
        cache: (ev.model() == Model::Cdcm).then(HashMap::new),
        limit: sa.cache_limit.max(1),
        evaluations: 0,
    };
    let mut state = State::random(m, n, &mut rng);
    let mut current = costs.get(&state.tiles);
    let initial = current.cost;
    let mut best = (state.tiles.clone(), current);
    let mut history = Vec::new();
    if m == 0 || n < 2 {
        return Run { initial, best, evaluations: costs.evaluations, history };
    }

    let t0 = match sa.initial_temp {
        InitialTemp::Fixed(t) => t,
        InitialTemp::Auto { acceptance, samples } => {
            let mut uphill = Vec::new();
            for _ in 0..samples {
                let (core, to) = state.random_move(&mut rng);
                let undo = state.apply(core, to);
                let d = costs.get(&state.tiles).cost.aj() - current.cost.aj();
                if d > 0.0 {
                    uphill.push(d);
                }
                state.apply(undo.0, undo.1);
            }
            if uphill.is_empty() {
                // flat neighbourhood: any positive temperature behaves alike
                1.0
            } else {
                let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
                -mean / acceptance.ln()
            }
        }
    };

    let moves = sa.moves_per_temp.unwrap_or(10 * n);
    let mut temp = t0;
    let mut frozen = 0;
    while temp >= t0 * sa.min_temp_ratio && frozen < sa.plateau {
        let mut moved = false;
        for _ in 0..moves {
            let (core, to) = state.random_move(&mut rng);
            let undo = state.apply(core, to);
            let next = costs.get(&state.tiles);
            let delta = next.cost.aj() - current.cost.aj();
            // draw unconditionally so the stream does not depend on the outcome
            let u: f64 = rng.gen();
            if delta <= 0.0 || u < (-delta / temp).exp() {
                moved |= delta != 0.0;
                current = next;
                if next.cost < best.1.cost {
                    best = (state.tiles.clone(), next);
                }
            } else {
                state.apply(undo.0, undo.1);
            }
        }
        history.push(best.1.cost);
        frozen = if moved { 0 } else { frozen + 1 };
        temp *= sa.alpha;
    }

    let mut state = State::from_tiles(best.0.clone(), n);
    let mut improved = true;
    while improved {
        improved = false;
        for core in 0..m {
            for slot in 0..n {
                let to = Tile(slot as u32 + 1);
                if state.tiles[core] == to {
                    continue;
                }
                let undo = state.apply(core, to);
                let next = costs.get(&state.tiles);
                if next.cost < best.1.cost {
                    best = (state.tiles.clone(), next);
                    improved = true;
                } else {
                    state.apply(undo.0, undo.1);
                }
            }
        }
    }
    if history.last() != Some(&best.1.cost) {
        history.push(best.1.cost);
    }
    Run { initial, best, evaluations: costs.evaluations, history }
}
