//! Mapping search under either objective.
//!
//! The volume-only objective is the dynamic NoC energy of the aggregate
//! communication graph. The timing-aware objective runs the simulator and
//! adds static energy over the resulting execution time.

pub mod anneal;
pub mod exhaustive;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::energy::{edynoc_cwm, pstnoc, TrafficTally};
use crate::error::Result;
use crate::graph::{Cdcg, Cwg};
use crate::mapping::Mapping;
use crate::mesh::{Mesh, Tile};
use crate::params::NocParams;
use crate::sim::{hops_between as hops, simulate, total_delay, SimOptions, Simulator};
use crate::units::{Energy, Power, Time};

pub use anneal::{simulated_annealing, InitialTemp, SaParams};
pub use exhaustive::{candidate_count, exhaustive_search, exhaustive_search_with_limit, DEFAULT_ENUMERATION_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Aggregate volumes only: dynamic energy.
    Cwm,
    /// Dependences, computation and contention: dynamic plus static energy.
    Cdcm,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Cwm => "cwm",
            Model::Cdcm => "cdcm",
        })
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cwm" => Ok(Model::Cwm),
            "cdcm" => Ok(Model::Cdcm),
            other => Err(format!("unknown model '{other}' (expected cwm or cdcm)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub model: Model,
    pub params: NocParams,
}

impl Objective {
    pub fn new(model: Model, params: NocParams) -> Self {
        Objective { model, params }
    }
}

/// Cost of one mapping. `texec` is only known to the timing-aware model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub cost: Energy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub texec: Option<Time>,
}

/// Evaluates `mapping` through the public energy model and simulator.
pub fn evaluate(objective: &Objective, app: &Cdcg, mapping: &Mapping, mesh: &Mesh) -> Result<Evaluation> {
    objective.params.validate()?;
    app.ensure_valid()?;
    mapping.check(app, mesh)?;
    match objective.model {
        Model::Cwm => {
            let cwg = Cwg::from_cdcg(app)?;
            let e = edynoc_cwm(&cwg, mapping, mesh, &objective.params)?;
            Ok(Evaluation { cost: e.edy_noc, texec: None })
        }
        Model::Cdcm => {
            let r = simulate(app, mapping, mesh, &objective.params)?;
            Ok(Evaluation { cost: r.enoc(), texec: Some(r.texec) })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub model: Model,
    pub best_mapping: Mapping,
    pub best_cost: Energy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_texec: Option<Time>,
    /// Cost of the starting placement of the winning annealing run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_cost: Option<Energy>,
    /// Objective computations performed (cache hits excluded).
    pub evaluations: u64,
    /// Wall-clock time; not part of the serialized form so that stored
    /// results are reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
    /// Best cost after each temperature step of the winning annealing run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<Energy>,
}

/// Pre-compiled objective over dense assignments (tile of the i-th core in
/// core-id order).
#[derive(Debug, Clone)]
pub(crate) struct Evaluator {
    model: Model,
    sim: Simulator,
    /// (source core index, destination core index, bits)
    pairs: Vec<(usize, usize, u64)>,
    static_power: Power,
}

impl Evaluator {
    pub fn new(objective: &Objective, app: &Cdcg, mesh: &Mesh) -> Result<Self> {
        let sim = Simulator::new(app, *mesh, objective.params)?;
        let cwg = Cwg::from_cdcg(app)?;
        let ix = |c| sim.app.cores.binary_search(&c).expect("core of the application");
        let pairs = cwg.edges.iter().map(|(&(a, b), &w)| (ix(a), ix(b), w)).collect();
        Ok(Evaluator { model: objective.model, sim, pairs, static_power: pstnoc(mesh, &objective.params) })
    }

    pub fn cores(&self) -> usize {
        self.sim.app.cores.len()
    }

    pub fn tiles(&self) -> usize {
        self.sim.mesh.tiles() as usize
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn mapping(&self, tiles: &[Tile]) -> Mapping {
        self.sim.app.mapping(tiles)
    }

    pub fn cost(&self, tiles: &[Tile]) -> Evaluation {
        match self.model {
            Model::Cwm => {
                let mut t = TrafficTally::default();
                for &(a, b, w) in &self.pairs {
                    t.add(w, hops(self.sim.mesh.width, tiles[a], tiles[b]));
                }
                Evaluation { cost: t.dynamic_energy(&self.sim.params), texec: None }
            }
            Model::Cdcm => {
                let out = self.sim.run(tiles, SimOptions::default());
                let cost = out.traffic.dynamic_energy(&self.sim.params) + self.static_power.over(out.texec);
                Evaluation { cost, texec: Some(out.texec) }
            }
        }
    }

    /// Lower bound on the cost of any completion of `partial`. Unplaced
    /// communication is assumed to cross two routers and contention is
    /// ignored.
    pub fn lower_bound(&self, partial: &[Option<Tile>]) -> Energy {
        let width = self.sim.mesh.width;
        let hop_lb = |a: usize, b: usize| match (partial[a], partial[b]) {
            (Some(x), Some(y)) => hops(width, x, y),
            _ => 2,
        };
        let params = &self.sim.params;
        match self.model {
            Model::Cwm => {
                let mut t = TrafficTally::default();
                for &(a, b, w) in &self.pairs {
                    t.add(w, hop_lb(a, b));
                }
                t.dynamic_energy(params)
            }
            Model::Cdcm => {
                let app = &self.sim.app;
                let mut t = TrafficTally::default();
                let mut ready = vec![Time::ZERO; app.packets.len()];
                let mut texec = Time::ZERO;
                for &i in &app.topo {
                    let p = &app.packets[i];
                    let h = hop_lb(p.src, p.dst);
                    t.add(p.bits, h);
                    let d = ready[i] + p.comp + total_delay(h, p.flits, params);
                    texec = texec.max(d);
                    for &j in &app.succs[i] {
                        ready[j] = ready[j].max(d);
                    }
                }
                t.dynamic_energy(params) + self.static_power.over(texec)
            }
        }
    }
}
