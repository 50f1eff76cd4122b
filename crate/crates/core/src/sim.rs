//! Contention-aware execution of a dependence graph on a mapped mesh.
//!
//! Packets are released when every predecessor has been delivered, compute
//! on their source core, then cross the XY route as a wormhole. Routers are
//! unary resources with unbounded input buffers: a header that finds its
//! router busy waits there, and the wait is carried to every downstream
//! hop. Competing headers are served in (arrival time, packet id) order.
//!
//! Per router `h` with header arrival `a` and service start
//! `s = max(a, router free)`, for a packet of `n` flits:
//!
//! * the router is busy over `[s, s + (tr + n·tl)·λ)`;
//! * the outbound link is busy over `[s + tr·λ, s + (tr + n·tl)·λ)`;
//! * the header reaches the next router at `s + (tr + tl)·λ`.
//!
//! The header first reaches the source router `tl·λ` after injection, and
//! the last flit reaches the destination core when the destination router
//! finishes, so without contention delivery equals injection plus
//! [`total_delay`].

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::energy::{estnoc, pstnoc, EnergyBreakdown, TrafficTally};
use crate::error::{Error, Result};
use crate::graph::{Cdcg, CoreId, PacketId, Vertex};
use crate::mapping::Mapping;
use crate::mesh::{Mesh, Resource, Tile};
use crate::params::NocParams;
use crate::units::{Energy, Time};

/// Number of flits for a packet: `ceil(bits / flit_width)`, at least one.
pub fn flit_count(bits: u64, params: &NocParams) -> u64 {
    bits.div_ceil(params.flit_width as u64).max(1)
}

/// Header latency over `hops` routers including both core links.
pub fn routing_delay(hops: u32, params: &NocParams) -> Time {
    let cycles = hops as u64 * (params.tr + params.tl) as u64 + params.tl as u64;
    params.lambda * cycles
}

/// Time for the remaining `flits - 1` body flits to follow the header.
pub fn packet_delay(flits: u64, params: &NocParams) -> Time {
    params.lambda * (params.tl as u64 * flits.saturating_sub(1))
}

/// Contention-free source-to-destination latency.
pub fn total_delay(hops: u32, flits: u64, params: &NocParams) -> Time {
    let cycles = hops as u64 * (params.tr + params.tl) as u64 + params.tl as u64 * flits;
    params.lambda * cycles
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusyInterval {
    /// Inclusive start.
    pub start: Time,
    /// Exclusive end.
    pub end: Time,
    pub packet: PacketId,
    pub bits: u64,
    /// The packet had been held up by contention when it used this resource.
    pub contended: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceTimeline {
    pub resource: Resource,
    /// Sorted by start time.
    pub busy: Vec<BusyInterval>,
}

/// A header that found its router busy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wait {
    pub packet: PacketId,
    pub resource: Resource,
    pub arrival: Time,
    pub start: Time,
    pub bits: u64,
}

impl Wait {
    pub fn duration(&self) -> Time {
        self.start - self.arrival
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub id: PacketId,
    pub src: CoreId,
    pub dst: CoreId,
    pub src_tile: Tile,
    pub dst_tile: Tile,
    pub hops: u32,
    pub flits: u64,
    pub bits: u64,
    /// All predecessors delivered.
    pub ready: Time,
    /// Computation finished, first flit leaves the core.
    pub injected: Time,
    /// Last flit reached the destination core.
    pub delivered: Time,
    /// Total time spent waiting for busy routers.
    pub waited: Time,
}

/// Computation of a source core before sending a packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeInterval {
    pub core: CoreId,
    pub packet: PacketId,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub texec: Time,
    pub packets: Vec<PacketRecord>,
    pub deliveries: BTreeMap<PacketId, Time>,
    pub timelines: Vec<ResourceTimeline>,
    pub computations: Vec<ComputeInterval>,
    pub waits: Vec<Wait>,
    /// Sum of all waits.
    pub contention: Time,
    pub energy: EnergyBreakdown,
}

impl SimReport {
    pub fn edy_noc(&self) -> Energy {
        self.energy.edy_noc
    }

    pub fn est_noc(&self) -> Energy {
        self.energy.est_noc
    }

    pub fn enoc(&self) -> Energy {
        self.energy.enoc
    }

    pub fn timeline(&self, r: Resource) -> Option<&ResourceTimeline> {
        self.timelines.iter().find(|t| t.resource == r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// When false every packet behaves as if it had private copies of all
    /// resources; used to obtain the contention-free reference.
    pub contention: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { contention: true }
    }
}

/// Runs `cdcg` on `mesh` under `mapping`.
pub fn simulate(cdcg: &Cdcg, mapping: &Mapping, mesh: &Mesh, params: &NocParams) -> Result<SimReport> {
    simulate_with(cdcg, mapping, mesh, params, SimOptions::default())
}

pub fn simulate_with(
    cdcg: &Cdcg,
    mapping: &Mapping,
    mesh: &Mesh,
    params: &NocParams,
    options: SimOptions,
) -> Result<SimReport> {
    mapping.check(cdcg, mesh)?;
    let sim = Simulator::new(cdcg, *mesh, *params)?;
    let tiles = sim.app.dense(mapping)?;
    Ok(sim.report(&tiles, options))
}

#[derive(Debug, Clone)]
pub(crate) struct DensePacket {
    pub id: PacketId,
    pub src: usize,
    pub dst: usize,
    pub comp: Time,
    pub bits: u64,
    pub flits: u64,
}

/// Application compiled to dense indices.
#[derive(Debug, Clone)]
pub(crate) struct CompiledApp {
    /// Sorted core ids; dense assignments are indexed in this order.
    pub cores: Vec<CoreId>,
    pub packets: Vec<DensePacket>,
    pub succs: Vec<Vec<usize>>,
    pub pred_count: Vec<u32>,
    /// Packets in a dependence-respecting order.
    pub topo: Vec<usize>,
}

impl CompiledApp {
    pub fn new(cdcg: &Cdcg, params: &NocParams) -> Result<Self> {
        let order = cdcg.topological_order()?;
        let mut cores: Vec<CoreId> = cdcg.cores.iter().map(|c| c.id).collect();
        cores.sort();
        let core_ix: HashMap<CoreId, usize> = cores.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let pos: HashMap<PacketId, usize> = cdcg.packets.iter().enumerate().map(|(i, p)| (p.id, i)).collect();
        let packets = cdcg
            .packets
            .iter()
            .map(|p| DensePacket {
                id: p.id,
                src: core_ix[&p.src],
                dst: core_ix[&p.dst],
                comp: p.comp_time,
                bits: p.bits,
                flits: flit_count(p.bits, params),
            })
            .collect();
        let mut succs = vec![Vec::new(); cdcg.packets.len()];
        let mut pred_count = vec![0u32; cdcg.packets.len()];
        for &(a, b) in &cdcg.deps {
            if let (Vertex::Packet(a), Vertex::Packet(b)) = (a, b) {
                succs[pos[&a]].push(pos[&b]);
                pred_count[pos[&b]] += 1;
            }
        }
        for s in &mut succs {
            s.sort_unstable();
        }
        let topo = order.iter().map(|p| pos[p]).collect();
        Ok(CompiledApp { cores, packets, succs, pred_count, topo })
    }

    pub fn dense(&self, mapping: &Mapping) -> Result<Vec<Tile>> {
        self.cores.iter().map(|&c| mapping.tile_of(c).ok_or(Error::UnmappedCore(c))).collect()
    }

    pub fn mapping(&self, tiles: &[Tile]) -> Mapping {
        Mapping::new(self.cores.iter().copied().zip(tiles.iter().copied())).expect("dense assignment is injective")
    }
}

/// Upper bound on any schedule's length: with a greedy arbiter something is
/// always computing, travelling or being served, so the makespan is at most
/// the sum of all of it. Fails if that sum does not fit in picoseconds.
fn schedule_bound(app: &CompiledApp, mesh: &Mesh, params: &NocParams) -> Result<Time> {
    let hops = mesh.width as u64 + mesh.height as u64 - 1;
    let (tr, tl, lambda) = (params.tr as u64, params.tl as u64, params.lambda.ps());
    app.packets
        .iter()
        .try_fold(0u64, |acc, p| {
            let per_router = p.flits.checked_mul(tl)?.checked_add(tr)?;
            let cycles = per_router.checked_mul(hops)?.checked_add(tl)?;
            acc.checked_add(p.comp.ps())?.checked_add(cycles.checked_mul(lambda)?)
        })
        .map(Time)
        .ok_or_else(|| Error::Overflow("worst-case schedule length exceeds 64-bit picoseconds".into()))
}

/// Outcome of a run without recorded timelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Outcome {
    pub texec: Time,
    pub traffic: TrafficTally,
    pub contention: Time,
}

#[derive(Debug, Clone)]
pub(crate) struct Simulator {
    pub app: CompiledApp,
    pub mesh: Mesh,
    pub params: NocParams,
}

struct Recorder {
    intervals: BTreeMap<Resource, Vec<BusyInterval>>,
    waits: Vec<Wait>,
    records: Vec<Option<PacketRecord>>,
    per_resource_bits: BTreeMap<Resource, u64>,
}

impl Recorder {
    fn busy(&mut self, r: Resource, iv: BusyInterval) {
        self.intervals.entry(r).or_default().push(iv);
        *self.per_resource_bits.entry(r).or_insert(0) += iv.bits;
    }
}

impl Simulator {
    pub fn new(cdcg: &Cdcg, mesh: Mesh, params: NocParams) -> Result<Self> {
        params.validate()?;
        cdcg.ensure_valid()?;
        let app = CompiledApp::new(cdcg, &params)?;
        crate::energy::check_traffic_range(app.packets.iter().map(|p| p.bits), &mesh)?;
        schedule_bound(&app, &mesh, &params)?;
        Ok(Simulator { app, mesh, params })
    }

    pub fn run(&self, tiles: &[Tile], options: SimOptions) -> Outcome {
        self.execute(tiles, options, None)
    }

    pub fn report(&self, tiles: &[Tile], options: SimOptions) -> SimReport {
        let mut rec = Recorder {
            intervals: BTreeMap::new(),
            waits: Vec::new(),
            records: vec![None; self.app.packets.len()],
            per_resource_bits: BTreeMap::new(),
        };
        let out = self.execute(tiles, options, Some(&mut rec));

        let packets: Vec<PacketRecord> = rec.records.into_iter().map(|r| r.expect("every packet delivered")).collect();
        let deliveries = packets.iter().map(|r| (r.id, r.delivered)).collect();
        let computations = packets
            .iter()
            .map(|r| ComputeInterval { core: r.src, packet: r.id, start: r.ready, end: r.injected })
            .collect();
        let timelines = rec
            .intervals
            .into_iter()
            .map(|(resource, mut busy)| {
                busy.sort_by_key(|b| (b.start, b.packet));
                ResourceTimeline { resource, busy }
            })
            .collect();
        let est = estnoc(pstnoc(&self.mesh, &self.params), out.texec);
        let energy = EnergyBreakdown::dynamic(out.traffic, rec.per_resource_bits, &self.params).with_static(est);
        SimReport {
            texec: out.texec,
            packets,
            deliveries,
            timelines,
            computations,
            waits: rec.waits,
            contention: out.contention,
            energy,
        }
    }

    fn execute(&self, tiles: &[Tile], options: SimOptions, mut rec: Option<&mut Recorder>) -> Outcome {
        let app = &self.app;
        let p = &self.params;
        let lambda = p.lambda;
        let width = self.mesh.width;
        let n = app.packets.len();

        let mut router_free = vec![Time::ZERO; self.mesh.tiles() as usize];
        let mut pending = app.pred_count.clone();
        let mut ready = vec![Time::ZERO; n];
        let mut waited = vec![Time::ZERO; n];
        let mut traffic = TrafficTally::default();
        let mut contention = Time::ZERO;
        let mut texec = Time::ZERO;

        // (arrival, packet id, packet index, tile)
        let mut heap: BinaryHeap<Reverse<(Time, u32, usize, u32)>> = BinaryHeap::new();
        let link_in = lambda * p.tl as u64;
        let release = |heap: &mut BinaryHeap<Reverse<(Time, u32, usize, u32)>>, i: usize, at: Time| {
            let pk = &app.packets[i];
            heap.push(Reverse((at + pk.comp + link_in, pk.id.0, i, tiles[pk.src].0)));
        };
        for i in 0..n {
            if pending[i] == 0 {
                release(&mut heap, i, Time::ZERO);
            }
        }

        while let Some(Reverse((arrival, _, i, tile))) = heap.pop() {
            let pk = &app.packets[i];
            let here = Tile(tile);
            let slot = here.slot();
            let start = if options.contention { arrival.max(router_free[slot]) } else { arrival };
            let hold = lambda * (p.tr as u64 + pk.flits * p.tl as u64);
            let end = start + hold;
            if options.contention {
                router_free[slot] = end;
            }
            let wait = start - arrival;
            waited[i] += wait;
            contention += wait;

            let src_tile = tiles[pk.src];
            let dst_tile = tiles[pk.dst];
            let first = here == src_tile;
            let last = here == dst_tile;

            if let Some(rec) = rec.as_deref_mut() {
                let iv = |s: Time, e: Time, contended: bool| BusyInterval {
                    start: s,
                    end: e,
                    packet: pk.id,
                    bits: pk.bits,
                    contended,
                };
                if wait > Time::ZERO {
                    rec.waits.push(Wait { packet: pk.id, resource: Resource::Router { tile: here }, arrival, start, bits: pk.bits });
                }
                if first {
                    let s = start - link_in;
                    rec.busy(Resource::Inject { tile: here }, iv(s, s + lambda * (pk.flits * p.tl as u64), wait > Time::ZERO));
                }
                rec.busy(Resource::Router { tile: here }, iv(start, end, wait > Time::ZERO));
                let out_start = start + lambda * p.tr as u64;
                if last {
                    rec.busy(Resource::Eject { tile: here }, iv(out_start, end, waited[i] > Time::ZERO));
                } else {
                    let next = xy_next(width, here, dst_tile);
                    rec.busy(Resource::Link { from: here, to: next }, iv(out_start, end, wait > Time::ZERO));
                }
            }

            if !last {
                let next = xy_next(width, here, dst_tile);
                heap.push(Reverse((start + lambda * (p.tr + p.tl) as u64, pk.id.0, i, next.0)));
                continue;
            }

            // delivered
            let delivered = end;
            let hops = hops_between(width, src_tile, dst_tile);
            traffic.add(pk.bits, hops);
            texec = texec.max(delivered);
            if let Some(rec) = rec.as_deref_mut() {
                rec.records[i] = Some(PacketRecord {
                    id: pk.id,
                    src: app.cores[pk.src],
                    dst: app.cores[pk.dst],
                    src_tile,
                    dst_tile,
                    hops,
                    flits: pk.flits,
                    bits: pk.bits,
                    ready: ready[i],
                    injected: ready[i] + pk.comp,
                    delivered,
                    waited: waited[i],
                });
            }
            for &j in &app.succs[i] {
                ready[j] = ready[j].max(delivered);
                pending[j] -= 1;
                if pending[j] == 0 {
                    release(&mut heap, j, ready[j]);
                }
            }
        }

        Outcome { texec, traffic, contention }
    }
}

fn xy_next(width: u32, here: Tile, dst: Tile) -> Tile {
    let (hx, hy) = ((here.0 - 1) % width, (here.0 - 1) / width);
    let (dx, dy) = ((dst.0 - 1) % width, (dst.0 - 1) / width);
    if hx < dx {
        Tile(here.0 + 1)
    } else if hx > dx {
        Tile(here.0 - 1)
    } else if hy < dy {
        Tile(here.0 + width)
    } else {
        debug_assert!(hy > dy);
        Tile(here.0 - width)
    }
}

pub(crate) fn hops_between(width: u32, a: Tile, b: Tile) -> u32 {
    let (ax, ay) = ((a.0 - 1) % width, (a.0 - 1) / width);
    let (bx, by) = ((b.0 - 1) % width, (b.0 - 1) / width);
    ax.abs_diff(bx) + ay.abs_diff(by) + 1
}
