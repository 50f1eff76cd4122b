//! Small hand-made instances shared by tests, benches and the docs.
//!
//! The four-core application has cores A, B, E and F exchanging six
//! packets on a 2x2 mesh. Its aggregate volumes are A→B 15, A→F 15,
//! B→F 40, E→A 35 and F→B 15 bits. E sends A two packets; once A has the
//! second it sends to B, and both A and B then send to F, which answers B.
//! Two placements are provided, with equal dynamic energy but different
//! execution times.

use crate::graph::{Cdcg, Core, CoreId, Packet, PacketId, Vertex};
use crate::mapping::Mapping;
use crate::mesh::Tile;
use crate::units::Time;

const NAMES: [&str; 4] = ["A", "B", "E", "F"];

/// Id of a named core of the four-core application.
pub fn core_id(name: &str) -> CoreId {
    CoreId(NAMES.iter().position(|n| *n == name).unwrap_or_else(|| panic!("no core named {name}")) as u32)
}

fn packet(id: u32, src: &str, dst: &str, comp_ns: u64, bits: u64) -> Packet {
    Packet { id: PacketId(id), src: core_id(src), dst: core_id(dst), comp_time: Time::from_ns(comp_ns), bits }
}

pub fn four_core_app() -> Cdcg {
    let cores = NAMES.iter().enumerate().map(|(i, n)| Core::named(i as u32, n)).collect();
    let packets = vec![
        packet(1, "E", "A", 10, 20),
        packet(2, "E", "A", 20, 15),
        packet(3, "A", "B", 2, 15),
        packet(4, "A", "F", 6, 15),
        packet(5, "B", "F", 3, 40),
        packet(6, "F", "B", 2, 15),
    ];
    let v = |i| Vertex::Packet(PacketId(i));
    let deps = vec![
        (Vertex::Start, v(1)),
        (v(1), v(2)),
        (v(2), v(3)),
        (v(3), v(4)),
        (v(3), v(5)),
        (v(4), v(6)),
        (v(5), v(6)),
        (v(6), Vertex::End),
    ];
    Cdcg::new(cores, packets, deps)
}

fn placement(order: [(&str, u32); 4]) -> Mapping {
    Mapping::new(order.iter().map(|&(c, t)| (core_id(c), Tile(t)))).expect("fixture placement is injective")
}

/// B on τ1, A on τ2, F on τ3, E on τ4: A→F is routed through τ1 where it
/// meets B→F.
pub fn mapping_contended() -> Mapping {
    placement([("B", 1), ("A", 2), ("F", 3), ("E", 4)])
}

/// B on τ1, E on τ2, F on τ3, A on τ4: A→F no longer crosses τ1 and the
/// two packets for F meet in τ3 instead.
pub fn mapping_alternate() -> Mapping {
    placement([("B", 1), ("E", 2), ("F", 3), ("A", 4)])
}

/// One packet of `bits` bits from core 0 to core 1 after `comp_ns` of
/// computation.
pub fn single_packet(bits: u64, comp_ns: u64) -> Cdcg {
    let p = Packet { id: PacketId(1), src: CoreId(0), dst: CoreId(1), comp_time: Time::from_ns(comp_ns), bits };
    let v = Vertex::Packet(PacketId(1));
    Cdcg::new(vec![Core::new(0), Core::new(1)], vec![p], vec![(Vertex::Start, v), (v, Vertex::End)])
}
