//! Mesh platform: tiles, directed inter-tile links and the resources a
//! packet can occupy.
//!
//! Tiles are numbered from 1 in row-major order starting at the origin, so
//! tile `i` sits at `x = (i - 1) % width`, `y = (i - 1) / width`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based tile index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tile(pub u32);

impl Tile {
    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based position, for dense tables.
    pub(crate) fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mesh {
    pub width: u32,
    pub height: u32,
}

impl Mesh {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height).is_none() {
            return Err(Error::InvalidMesh { width, height });
        }
        Ok(Mesh { width, height })
    }

    pub fn tiles(&self) -> u32 {
        self.width * self.height
    }

    pub fn tile_iter(&self) -> impl Iterator<Item = Tile> {
        (1..=self.tiles()).map(Tile)
    }

    pub fn check_tile(&self, tile: Tile) -> Result<()> {
        if tile.0 == 0 || tile.0 > self.tiles() {
            Err(Error::TileOutOfRange { tile: tile.0, tiles: self.tiles() })
        } else {
            Ok(())
        }
    }

    pub fn coords(&self, tile: Tile) -> Result<(u32, u32)> {
        self.check_tile(tile)?;
        let i = tile.0 - 1;
        Ok((i % self.width, i / self.width))
    }

    pub fn tile_at(&self, x: u32, y: u32) -> Result<Tile> {
        if x >= self.width || y >= self.height {
            return Err(Error::CoordsOutOfRange { x, y, width: self.width, height: self.height });
        }
        Ok(Tile(y * self.width + x + 1))
    }

    pub fn are_neighbors(&self, a: Tile, b: Tile) -> bool {
        match (self.coords(a), self.coords(b)) {
            (Ok((ax, ay)), Ok((bx, by))) => ax.abs_diff(bx) + ay.abs_diff(by) == 1,
            _ => false,
        }
    }

    /// Every directed link between 4-neighbour tiles.
    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        for from in self.tile_iter() {
            for dir in Direction::ALL {
                if let Some(to) = self.step(from, dir) {
                    out.push(Link { from, to });
                }
            }
        }
        out
    }

    pub(crate) fn step(&self, tile: Tile, dir: Direction) -> Option<Tile> {
        let (x, y) = self.coords(tile).ok()?;
        let (nx, ny) = match dir {
            Direction::East => (x.checked_add(1)?, y),
            Direction::West => (x.checked_sub(1)?, y),
            Direction::North => (x, y.checked_sub(1)?),
            Direction::South => (x, y.checked_add(1)?),
        };
        self.tile_at(nx, ny).ok()
    }
}

impl fmt::Display for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Direction of an inter-tile link. North is towards row 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    East,
    West,
    North,
    South,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::East, Direction::West, Direction::North, Direction::South];
}

/// Directed physical link between two neighbouring routers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub from: Tile,
    pub to: Tile,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{}", self.from, self.to)
    }
}

/// Anything a packet occupies on its way: a router, an inter-tile link, or
/// one of the two attachment links between a tile's core and its router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resource {
    Router { tile: Tile },
    Link { from: Tile, to: Tile },
    /// Core to router.
    Inject { tile: Tile },
    /// Router to core.
    Eject { tile: Tile },
}

impl Resource {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Resource::Router { .. } => "router",
            Resource::Link { .. } => "link",
            Resource::Inject { .. } => "inject",
            Resource::Eject { .. } => "eject",
        }
    }

    /// The tile the resource belongs to (source tile for links).
    pub fn tile(&self) -> Tile {
        match *self {
            Resource::Router { tile } | Resource::Inject { tile } | Resource::Eject { tile } => tile,
            Resource::Link { from, .. } => from,
        }
    }
}

impl From<Link> for Resource {
    fn from(l: Link) -> Self {
        Resource::Link { from: l.from, to: l.to }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Router { tile } => write!(f, "{tile}"),
            Resource::Link { from, to } => write!(f, "{from}→{to}"),
            Resource::Inject { tile } => write!(f, "core→{tile}"),
            Resource::Eject { tile } => write!(f, "{tile}→core"),
        }
    }
}
