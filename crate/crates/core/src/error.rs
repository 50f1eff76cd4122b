use thiserror::Error;

use crate::graph::{CoreId, Violation};
use crate::mesh::Tile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid application graph: {}", join(.0))]
    InvalidCdcg(Vec<Violation>),

    #[error("invalid mesh {width}x{height}: dimensions must be at least 1 and the tile count must fit 32 bits")]
    InvalidMesh { width: u32, height: u32 },

    #[error("tile {tile} out of range 1..={tiles}")]
    TileOutOfRange { tile: u32, tiles: u32 },

    #[error("coordinates ({x}, {y}) outside a {width}x{height} mesh")]
    CoordsOutOfRange { x: u32, y: u32, width: u32, height: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("core {0} is not mapped")]
    UnmappedCore(CoreId),

    #[error("mapping places cores {first} and {second} on the same tile {tile}")]
    TileCollision { first: CoreId, second: CoreId, tile: Tile },

    #[error("mapping refers to core {0}, which the application does not define")]
    UnknownCore(CoreId),

    #[error("{cores} cores do not fit on {tiles} tiles")]
    TooManyCores { cores: usize, tiles: usize },

    #[error("exhaustive search needs {candidates} candidate mappings, above the limit of {limit}")]
    InstanceTooLarge { candidates: String, limit: u128 },

    #[error("instance too large: {0}")]
    Overflow(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
