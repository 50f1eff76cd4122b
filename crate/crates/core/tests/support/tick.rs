//! Time-stepped reference simulator.
//!
//! Advances a clock one tick at a time and, at every tick, lets each idle
//! router start the waiting header that arrived first (smaller packet id on
//! ties). Shares nothing with the event-driven simulator beyond the public
//! input types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nocmap::{Cdcg, Mapping, Mesh, NocParams, PacketId, Tile, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickRun {
    pub texec: u64,
    pub delivered: BTreeMap<PacketId, u64>,
    /// Router tile -> (start, end, packet), in service order.
    pub routers: BTreeMap<u32, Vec<(u64, u64, PacketId)>>,
    /// Sum of (start - arrival) over all routers.
    pub total_wait: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn route(mesh: &Mesh, from: Tile, to: Tile) -> Vec<u32> {
    let w = mesh.width as i64;
    let (mut x, mut y) = ((from.0 as i64 - 1) % w, (from.0 as i64 - 1) / w);
    let (tx, ty) = ((to.0 as i64 - 1) % w, (to.0 as i64 - 1) / w);
    let mut out = vec![(y * w + x + 1) as u32];
    while x != tx {
        x += (tx - x).signum();
        out.push((y * w + x + 1) as u32);
    }
    while y != ty {
        y += (ty - y).signum();
        out.push((y * w + x + 1) as u32);
    }
    out
}

enum State {
    Blocked,
    Waiting { hop: usize, arrival: u64 },
    Done,
}

pub fn run(app: &Cdcg, mapping: &Mapping, mesh: &Mesh, p: &NocParams) -> TickRun {
    let lambda = p.lambda.ps();
    let (tr, tl) = (p.tr as u64, p.tl as u64);
    let tick = app.packets.iter().fold(lambda, |g, pk| gcd(g, pk.comp_time.ps()));

    let n = app.packets.len();
    let ix: BTreeMap<PacketId, usize> = app.packets.iter().enumerate().map(|(i, pk)| (pk.id, i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &app.deps {
        if let (Vertex::Packet(a), Vertex::Packet(b)) = (a, b) {
            preds[ix[&b]].push(ix[&a]);
        }
    }
    let routes: Vec<Vec<u32>> = app
        .packets
        .iter()
        .map(|pk| route(mesh, mapping.tile_of(pk.src).unwrap(), mapping.tile_of(pk.dst).unwrap()))
        .collect();
    let flits: Vec<u64> = app.packets.iter().map(|pk| pk.bits.div_ceil(p.flit_width as u64).max(1)).collect();

    let mut state: Vec<State> = (0..n).map(|_| State::Blocked).collect();
    let mut delivered: Vec<Option<u64>> = vec![None; n];
    let mut free_at: BTreeMap<u32, u64> = BTreeMap::new();
    let mut routers: BTreeMap<u32, Vec<(u64, u64, PacketId)>> = BTreeMap::new();
    let mut total_wait = 0;
    let mut done = 0;
    let mut t = 0u64;
    while done < n {
        for i in 0..n {
            if matches!(state[i], State::Blocked) && preds[i].iter().all(|&q| delivered[q].is_some()) {
                let ready = preds[i].iter().map(|&q| delivered[q].unwrap()).max().unwrap_or(0);
                let arrival = ready + app.packets[i].comp_time.ps() + tl * lambda;
                state[i] = State::Waiting { hop: 0, arrival };
            }
        }
        let mut by_router: BTreeMap<u32, Vec<(u64, PacketId, usize)>> = BTreeMap::new();
        for i in 0..n {
            if let State::Waiting { hop, arrival } = state[i] {
                if arrival <= t {
                    by_router.entry(routes[i][hop]).or_default().push((arrival, app.packets[i].id, i));
                }
            }
        }
        for (router, mut queue) in by_router {
            if free_at.get(&router).copied().unwrap_or(0) > t {
                continue;
            }
            queue.sort();
            let (arrival, id, i) = queue[0];
            let end = t + (tr + flits[i] * tl) * lambda;
            free_at.insert(router, end);
            routers.entry(router).or_default().push((t, end, id));
            total_wait += t - arrival;
            let State::Waiting { hop, .. } = state[i] else { unreachable!() };
            if hop + 1 == routes[i].len() {
                delivered[i] = Some(end);
                state[i] = State::Done;
                done += 1;
            } else {
                state[i] = State::Waiting { hop: hop + 1, arrival: t + (tr + tl) * lambda };
            }
        }
        t += tick;
    }
    let delivered: BTreeMap<PacketId, u64> =
        app.packets.iter().zip(&delivered).map(|(pk, d)| (pk.id, d.unwrap())).collect();
    TickRun { texec: delivered.values().copied().max().unwrap_or(0), delivered, routers, total_wait }
}
