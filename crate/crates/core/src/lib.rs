//! Mapping of application cores onto mesh network-on-chip tiles, driven
//! either by aggregate communication volume or by a contention-aware
//! simulation of packet dependences.

pub mod benchgen;
pub mod compare;
pub mod contention;
pub mod energy;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod mapper;
pub mod mapping;
pub mod mesh;
pub mod params;
pub mod routing;
pub mod sim;
pub mod trace;
pub mod units;

pub use error::{Error, Result};
pub use io::{LoadError, Platform};
pub use graph::{Cdcg, Core, CoreId, Cwg, Packet, PacketId, Vertex, Violation};
pub use compare::{ComparisonReport, ComparisonRow, Metrics};
pub use contention::{contention_stats, ContentionStats};
pub use mapper::{evaluate, exhaustive_search, simulated_annealing, Evaluation, Model, Objective, SaParams, SearchResult};
pub use mapping::Mapping;
pub use mesh::{Link, Mesh, Resource, Tile};
pub use params::NocParams;
pub use sim::{simulate, SimReport};
pub use units::{Energy, Power, Time};
