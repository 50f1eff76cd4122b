use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cdcg, CoreId};
use crate::mesh::{Mesh, Tile};

/// Injective assignment of cores to tiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mapping {
    assignment: BTreeMap<CoreId, Tile>,
}

impl Mapping {
    /// Builds a mapping, rejecting two cores on one tile.
    pub fn new(pairs: impl IntoIterator<Item = (CoreId, Tile)>) -> Result<Self> {
        let mut assignment = BTreeMap::new();
        let mut used: HashMap<Tile, CoreId> = HashMap::new();
        for (core, tile) in pairs {
            if let Some(&first) = used.get(&tile) {
                return Err(Error::TileCollision { first, second: core, tile });
            }
            if let Some(old) = assignment.insert(core, tile) {
                return Err(Error::InvalidParams(format!("core {core} assigned twice ({old} and {tile})")));
            }
            used.insert(tile, core);
        }
        Ok(Mapping { assignment })
    }

    pub fn tile_of(&self, core: CoreId) -> Option<Tile> {
        self.assignment.get(&core).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CoreId, Tile)> + '_ {
        self.assignment.iter().map(|(&c, &t)| (c, t))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Checks that every application core is placed on an in-range tile and
    /// that the mapping names no foreign cores.
    pub fn check(&self, app: &Cdcg, mesh: &Mesh) -> Result<()> {
        for core in &app.cores {
            if !self.assignment.contains_key(&core.id) {
                return Err(Error::UnmappedCore(core.id));
            }
        }
        for (&core, &tile) in &self.assignment {
            if app.core(core).is_none() {
                return Err(Error::UnknownCore(core));
            }
            mesh.check_tile(tile)?;
        }
        Ok(())
    }

    /// Tiles in core-id order: the vector ties between equal-cost mappings
    /// are broken on.
    pub fn assignment_vector(&self) -> Vec<Tile> {
        self.assignment.values().copied().collect()
    }
}
