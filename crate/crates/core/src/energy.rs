//! Closed-form NoC energy model.
//!
//! Dynamic energy is bookkept as bit counts per resource class (router,
//! inter-tile link, core attachment link) and only turned into joules at the
//! end. Two evaluations that move the same bits over the same hop counts
//! therefore produce bit-identical energies regardless of summation order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cdcg, CoreId, Cwg};
use crate::mapping::Mapping;
use crate::mesh::{Mesh, Resource, Tile};
use crate::params::NocParams;
use crate::routing::xy_route;
use crate::units::{Energy, Power, Time};

/// Energy of one bit crossing `hops` routers, `hops - 1` inter-tile links
/// and the two core attachment links.
pub fn ebit_per_hop_path(hops: u32, params: &NocParams) -> Energy {
    debug_assert!(hops >= 1);
    Energy(
        params.erbit.aj() * hops as f64
            + params.elbit.aj() * (hops.saturating_sub(1)) as f64
            + params.ecbit.aj() * 2.0,
    )
}

/// Bits moved through each class of resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrafficTally {
    pub router_bits: u64,
    pub link_bits: u64,
    pub core_link_bits: u64,
}

impl TrafficTally {
    pub fn add(&mut self, bits: u64, hops: u32) {
        self.router_bits += bits * hops as u64;
        self.link_bits += bits * hops.saturating_sub(1) as u64;
        self.core_link_bits += bits * 2;
    }

    pub fn dynamic_energy(&self, params: &NocParams) -> Energy {
        params.erbit.times_bits(self.router_bits)
            + params.elbit.times_bits(self.link_bits)
            + params.ecbit.times_bits(self.core_link_bits)
    }
}

/// Dynamic, static and total NoC energy plus the per-resource dynamic
/// contributions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub edy_noc: Energy,
    pub est_noc: Energy,
    pub enoc: Energy,
    pub traffic: TrafficTally,
    /// Bits that crossed each resource.
    #[serde(with = "resource_map")]
    pub per_resource_bits: BTreeMap<Resource, u64>,
}

impl EnergyBreakdown {
    pub(crate) fn dynamic(traffic: TrafficTally, per_resource_bits: BTreeMap<Resource, u64>, params: &NocParams) -> Self {
        let edy = traffic.dynamic_energy(params);
        EnergyBreakdown { edy_noc: edy, est_noc: Energy::ZERO, enoc: edy, traffic, per_resource_bits }
    }

    pub(crate) fn with_static(mut self, est: Energy) -> Self {
        self.est_noc = est;
        self.enoc = enoc(est, self.edy_noc);
        self
    }

    /// Dynamic energy dissipated in each resource.
    pub fn per_resource(&self, params: &NocParams) -> BTreeMap<Resource, Energy> {
        self.per_resource_bits
            .iter()
            .map(|(&r, &bits)| {
                let per_bit = match r {
                    Resource::Router { .. } => params.erbit,
                    Resource::Link { .. } => params.elbit,
                    Resource::Inject { .. } | Resource::Eject { .. } => params.ecbit,
                };
                (r, per_bit.times_bits(bits))
            })
            .collect()
    }
}

/// JSON objects need string keys, so the resource map is stored as a list.
mod resource_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        resource: Resource,
        bits: u64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Resource, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|(&resource, &bits)| Entry { resource, bits }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Resource, u64>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.resource, e.bits)).collect())
    }
}

fn tile(mapping: &Mapping, core: CoreId) -> Result<Tile> {
    mapping.tile_of(core).ok_or(Error::UnmappedCore(core))
}

fn charge(
    mesh: &Mesh,
    src: Tile,
    dst: Tile,
    bits: u64,
    traffic: &mut TrafficTally,
    per_resource: &mut BTreeMap<Resource, u64>,
) -> Result<()> {
    let path = xy_route(mesh, src, dst)?;
    traffic.add(bits, path.hops());
    for r in path.resources() {
        *per_resource.entry(r).or_insert(0) += bits;
    }
    Ok(())
}

/// Fails if the bit-hop counts of `bits` on `mesh` could overflow a tally.
pub(crate) fn check_traffic_range(bits: impl IntoIterator<Item = u64>, mesh: &Mesh) -> Result<()> {
    let span = mesh.width as u64 + mesh.height as u64 + 1;
    bits.into_iter()
        .try_fold(0u64, |acc, b| acc.checked_add(b))
        .and_then(|total| total.checked_mul(span))
        .map(|_| ())
        .ok_or_else(|| Error::Overflow("traffic volume times route length exceeds 64 bits".into()))
}

/// Dynamic energy of a communication weighted graph: every edge charges its
/// weight to each router and link on its XY route. Static energy is zero
/// because the graph carries no timing.
pub fn edynoc_cwm(cwg: &Cwg, mapping: &Mapping, mesh: &Mesh, params: &NocParams) -> Result<EnergyBreakdown> {
    for c in &cwg.cores {
        tile(mapping, c.id)?;
    }
    check_traffic_range(cwg.edges.values().copied(), mesh)?;
    let mut traffic = TrafficTally::default();
    let mut per_resource = BTreeMap::new();
    for (&(a, b), &w) in &cwg.edges {
        charge(mesh, tile(mapping, a)?, tile(mapping, b)?, w, &mut traffic, &mut per_resource)?;
    }
    Ok(EnergyBreakdown::dynamic(traffic, per_resource, params))
}

/// Dynamic energy of a dependence graph, packet by packet.
pub fn edynoc_cdcm(cdcg: &Cdcg, mapping: &Mapping, mesh: &Mesh, params: &NocParams) -> Result<Energy> {
    Ok(cdcm_breakdown(cdcg, mapping, mesh, params)?.edy_noc)
}

pub fn cdcm_breakdown(cdcg: &Cdcg, mapping: &Mapping, mesh: &Mesh, params: &NocParams) -> Result<EnergyBreakdown> {
    cdcg.ensure_valid()?;
    mapping.check(cdcg, mesh)?;
    check_traffic_range(cdcg.packets.iter().map(|p| p.bits), mesh)?;
    let mut traffic = TrafficTally::default();
    let mut per_resource = BTreeMap::new();
    for p in &cdcg.packets {
        charge(mesh, tile(mapping, p.src)?, tile(mapping, p.dst)?, p.bits, &mut traffic, &mut per_resource)?;
    }
    Ok(EnergyBreakdown::dynamic(traffic, per_resource, params))
}

/// Static power of the whole NoC: one router per tile.
pub fn pstnoc(mesh: &Mesh, params: &NocParams) -> Power {
    params.ps_router * mesh.tiles() as u64
}

pub fn estnoc(pstnoc: Power, texec: Time) -> Energy {
    pstnoc.over(texec)
}

pub fn enoc(est: Energy, edy: Energy) -> Energy {
    est + edy
}
