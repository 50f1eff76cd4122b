//! Aggregate contention figures of a simulation run.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::PacketId;
use crate::mesh::Resource;
use crate::sim::SimReport;
use crate::units::Time;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceContention {
    pub resource: Resource,
    pub wait: Time,
    pub waiting_packets: usize,
    /// Largest number of bits held in the input buffer at one instant.
    pub max_queue_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContentionStats {
    pub total_wait: Time,
    /// Distinct (waiting packet, packet in service) pairs, counted per
    /// resource.
    pub contended_pairs: usize,
    pub max_queue_bits: u64,
    /// Only resources where something waited, in resource order.
    pub per_resource: Vec<ResourceContention>,
}

pub fn contention_stats(report: &SimReport) -> ContentionStats {
    let mut by_resource: BTreeMap<Resource, Vec<_>> = BTreeMap::new();
    for w in &report.waits {
        by_resource.entry(w.resource).or_default().push(*w);
    }

    let mut stats = ContentionStats::default();
    for (resource, waits) in by_resource {
        let busy = report.timeline(resource).map(|t| t.busy.as_slice()).unwrap_or(&[]);
        let mut pairs: BTreeSet<(PacketId, PacketId)> = BTreeSet::new();
        for w in &waits {
            for b in busy {
                if b.packet != w.packet && b.start < w.start && b.end > w.arrival {
                    pairs.insert((w.packet, b.packet));
                }
            }
        }

        // sweep over [arrival, start) occupancy of the input buffer
        let mut events: Vec<(Time, i8, u64)> = Vec::new();
        for w in &waits {
            events.push((w.arrival, 1, w.bits));
            events.push((w.start, -1, w.bits));
        }
        events.sort_by_key(|&(t, kind, _)| (t, kind));
        let (mut queued, mut max_queue) = (0u64, 0u64);
        for (_, kind, bits) in events {
            if kind > 0 {
                queued += bits;
                max_queue = max_queue.max(queued);
            } else {
                queued -= bits;
            }
        }

        let wait: Time = waits.iter().map(|w| w.duration()).sum();
        stats.total_wait += wait;
        stats.contended_pairs += pairs.len();
        stats.max_queue_bits = stats.max_queue_bits.max(max_queue);
        stats.per_resource.push(ResourceContention {
            resource,
            wait,
            waiting_packets: waits.len(),
            max_queue_bits: max_queue,
        });
    }
    stats
}
