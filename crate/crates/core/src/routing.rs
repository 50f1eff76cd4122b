//! Deterministic XY routing.

use crate::error::Result;
use crate::mesh::{Link, Mesh, Resource, Tile};

/// Route of a packet between two tiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    /// Routers crossed, source tile first.
    pub routers: Vec<Tile>,
    /// Inter-tile links, one fewer than routers.
    pub links: Vec<Link>,
}

impl Path {
    /// Number of routers crossed (η).
    pub fn hops(&self) -> u32 {
        self.routers.len() as u32
    }

    pub fn source(&self) -> Tile {
        self.routers[0]
    }

    pub fn destination(&self) -> Tile {
        *self.routers.last().expect("a path has at least one router")
    }

    /// Core-to-router link at the source and router-to-core link at the
    /// destination.
    pub fn core_links(&self) -> (Resource, Resource) {
        (Resource::Inject { tile: self.source() }, Resource::Eject { tile: self.destination() })
    }

    /// Every resource in traversal order: inject, router, link, router, ...,
    /// router, eject.
    pub fn resources(&self) -> Vec<Resource> {
        let mut out = Vec::with_capacity(2 * self.routers.len() + 1);
        out.push(Resource::Inject { tile: self.source() });
        for (i, &tile) in self.routers.iter().enumerate() {
            out.push(Resource::Router { tile });
            if let Some(&l) = self.links.get(i) {
                out.push(l.into());
            }
        }
        out.push(Resource::Eject { tile: self.destination() });
        out
    }
}

/// Moves along X until the destination column is reached, then along Y.
pub fn xy_route(mesh: &Mesh, src: Tile, dst: Tile) -> Result<Path> {
    let (mut x, mut y) = mesh.coords(src)?;
    let (tx, ty) = mesh.coords(dst)?;
    let mut routers = vec![src];
    let mut links = Vec::new();
    let mut here = src;
    while (x, y) != (tx, ty) {
        if x != tx {
            x = if tx > x { x + 1 } else { x - 1 };
        } else {
            y = if ty > y { y + 1 } else { y - 1 };
        }
        let next = mesh.tile_at(x, y)?;
        links.push(Link { from: here, to: next });
        routers.push(next);
        here = next;
    }
    Ok(Path { routers, links })
}

/// Router count between two tiles without building the path.
pub fn hop_count(mesh: &Mesh, src: Tile, dst: Tile) -> Result<u32> {
    let (sx, sy) = mesh.coords(src)?;
    let (dx, dy) = mesh.coords(dst)?;
    Ok(sx.abs_diff(dx) + sy.abs_diff(dy) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn x_then_y_on_2x2() {
        let m = Mesh::new(2, 2).unwrap();
        let p = xy_route(&m, Tile(2), Tile(3)).unwrap();
        assert_eq!(p.routers, vec![Tile(2), Tile(1), Tile(3)]);
        assert_eq!(p.hops(), 3);
        assert_eq!(p.links, vec![Link { from: Tile(2), to: Tile(1) }, Link { from: Tile(1), to: Tile(3) }]);
    }

    #[test]
    fn zero_displacement() {
        let m = Mesh::new(2, 2).unwrap();
        let p = xy_route(&m, Tile(1), Tile(1)).unwrap();
        assert_eq!(p.routers, vec![Tile(1)]);
        assert!(p.links.is_empty());
        assert_eq!(
            p.resources(),
            vec![Resource::Inject { tile: Tile(1) }, Resource::Router { tile: Tile(1) }, Resource::Eject { tile: Tile(1) }]
        );
    }

    #[test]
    fn corner_to_corner_on_3x3() {
        let m = Mesh::new(3, 3).unwrap();
        let p = xy_route(&m, Tile(1), Tile(9)).unwrap();
        assert_eq!(p.hops(), 5);
        assert_eq!(p.routers, vec![Tile(1), Tile(2), Tile(3), Tile(6), Tile(9)]);
    }

    #[test]
    fn invalid_tiles() {
        let m = Mesh::new(2, 2).unwrap();
        assert!(xy_route(&m, Tile(0), Tile(1)).is_err());
        assert!(xy_route(&m, Tile(1), Tile(5)).is_err());
    }

    proptest! {
        #[test]
        fn path_properties(w in 1u32..9, h in 1u32..9, a in 0u32..1000, b in 0u32..1000) {
            let m = Mesh::new(w, h).unwrap();
            let (s, d) = (Tile(a % m.tiles() + 1), Tile(b % m.tiles() + 1));
            let p = xy_route(&m, s, d).unwrap();
            let back = xy_route(&m, d, s).unwrap();
            prop_assert_eq!(p.hops(), back.hops());
            prop_assert_eq!(p.hops(), hop_count(&m, s, d).unwrap());
            prop_assert!(p.hops() >= 1 && p.hops() < w + h);
            prop_assert_eq!(p.links.len() + 1, p.routers.len());
            for (i, l) in p.links.iter().enumerate() {
                prop_assert_eq!(l.from, p.routers[i]);
                prop_assert_eq!(l.to, p.routers[i + 1]);
                prop_assert!(m.are_neighbors(l.from, l.to));
            }
            let mut uniq = p.routers.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), p.routers.len());
            // all X moves precede all Y moves
            let ys: Vec<u32> = p.routers.iter().map(|&t| m.coords(t).unwrap().1).collect();
            let first_y_move = ys.windows(2).position(|w| w[0] != w[1]);
            if let Some(k) = first_y_move {
                let xs: Vec<u32> = p.routers[k..].iter().map(|&t| m.coords(t).unwrap().0).collect();
                prop_assert!(xs.iter().all(|&x| x == xs[0]));
            }
        }
    }
}
