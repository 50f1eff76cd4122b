//! Shared inputs for the benchmarks.

use nocmap::benchgen::{generate, preset};
use nocmap::{Cdcg, Mapping, Mesh, Tile};

/// A preset application with core i placed on tile i + 1.
pub fn workload(name: &str) -> (Cdcg, Mesh, Mapping) {
    let p = preset(name).unwrap_or_else(|| panic!("unknown preset {name}"));
    let app = generate(&p.config).expect("preset generates");
    let mapping = Mapping::new(app.cores.iter().enumerate().map(|(i, c)| (c.id, Tile(i as u32 + 1)))).expect("injective");
    (app, p.mesh, mapping)
}
