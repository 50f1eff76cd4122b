//! Seeded random application generator.
//!
//! Packets are laid out in ranks. Each packet depends on one packet of the
//! rank right below it plus up to `max_fanout - 1` more from any lower rank,
//! so the dependence graph is acyclic by construction. A packet is usually
//! sent by the core that received one of its predecessors. Volumes and
//! computation times are drawn log-uniformly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Cdcg, Core, CoreId, Packet, PacketId, Vertex};
use crate::mesh::Mesh;
use crate::units::Time;

/// Probability that a packet leaves from the core its first predecessor
/// was delivered to.
const FOLLOW_PREDECESSOR: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_cores: usize,
    pub n_packets: usize,
    /// Inclusive per-packet volume range in bits.
    pub volume_range: (u64, u64),
    /// Inclusive computation-time range.
    pub comp_range: (Time, Time),
    pub max_fanout: usize,
    pub seed: u64,
    /// When set, volumes are rescaled so that they add up to exactly this
    /// many bits (each packet keeps at least one bit).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_bits: Option<u64>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Infeasible(m));
        if self.n_cores < 2 {
            return bad(format!("need at least 2 cores, got {}", self.n_cores));
        }
        if self.n_packets == 0 {
            return bad("need at least one packet".into());
        }
        if 2 * self.n_packets < self.n_cores {
            return bad(format!("{} packets cannot involve all {} cores", self.n_packets, self.n_cores));
        }
        let (vmin, vmax) = self.volume_range;
        if vmin == 0 || vmin > vmax {
            return bad(format!("volume range {vmin}..={vmax} must be non-empty and start at 1 bit or more"));
        }
        let (cmin, cmax) = self.comp_range;
        if cmin > cmax {
            return bad(format!("computation range {cmin}..={cmax} ns is empty"));
        }
        if self.max_fanout == 0 {
            return bad("max_fanout must be at least 1".into());
        }
        if let Some(t) = self.total_bits {
            if t < self.n_packets as u64 {
                return bad(format!("{t} bits cannot be spread over {} packets", self.n_packets));
            }
        }
        Ok(())
    }
}

pub fn generate(config: &BenchConfig) -> Result<Cdcg> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let p = config.n_packets;
    let c = config.n_cores;

    let width = (p as f64).sqrt().ceil() as usize;
    let rank = |i: usize| i / width;
    let rank_start = |r: usize| r * width;

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); p];
    for i in 0..p {
        let r = rank(i);
        if r == 0 {
            continue;
        }
        let first = rng.gen_range(rank_start(r - 1)..rank_start(r));
        preds[i].push(first);
        let extra = rng.gen_range(0..config.max_fanout);
        for _ in 0..extra {
            let q = rng.gen_range(0..rank_start(r));
            if !preds[i].contains(&q) {
                preds[i].push(q);
            }
        }
    }

    let mut ends: Vec<(usize, usize)> = Vec::with_capacity(p);
    for i in 0..p {
        let src = match preds[i].first() {
            Some(&q) if rng.gen_bool(FOLLOW_PREDECESSOR) => ends[q].1,
            _ => rng.gen_range(0..c),
        };
        let mut dst = rng.gen_range(0..c - 1);
        if dst >= src {
            dst += 1;
        }
        ends.push((src, dst));
    }
    cover_all_cores(&mut ends, c, &mut rng);

    let mut volumes: Vec<u64> = (0..p).map(|_| log_uniform(&mut rng, config.volume_range.0, config.volume_range.1)).collect();
    if let Some(total) = config.total_bits {
        volumes = rescale(&volumes, total);
    }
    let (cmin, cmax) = config.comp_range;
    let comps: Vec<Time> = (0..p).map(|_| Time(log_uniform_from_zero(&mut rng, cmin.0, cmax.0))).collect();

    let cores = (0..c as u32).map(Core::new).collect();
    let packets = (0..p)
        .map(|i| Packet {
            id: PacketId(i as u32 + 1),
            src: CoreId(ends[i].0 as u32),
            dst: CoreId(ends[i].1 as u32),
            comp_time: comps[i],
            bits: volumes[i],
        })
        .collect();
    let v = |i: usize| Vertex::Packet(PacketId(i as u32 + 1));
    let mut has_succ = vec![false; p];
    let mut deps = Vec::new();
    for i in 0..p {
        if preds[i].is_empty() {
            deps.push((Vertex::Start, v(i)));
        }
        let mut ps = preds[i].clone();
        ps.sort_unstable();
        for q in ps {
            has_succ[q] = true;
            deps.push((v(q), v(i)));
        }
    }
    for (i, _) in has_succ.iter().enumerate().filter(|(_, s)| !**s) {
        deps.push((v(i), Vertex::End));
    }
    let app = Cdcg::new(cores, packets, deps);
    debug_assert!(app.validate().is_empty());
    Ok(app)
}

/// Moves surplus endpoint slots onto cores that no packet touches yet.
fn cover_all_cores(ends: &mut [(usize, usize)], cores: usize, rng: &mut ChaCha8Rng) {
    let mut count = vec![0usize; cores];
    for &(s, d) in ends.iter() {
        count[s] += 1;
        count[d] += 1;
    }
    let mut order: Vec<usize> = (0..ends.len() * 2).collect();
    order.shuffle(rng);
    for core in 0..cores {
        if count[core] > 0 {
            continue;
        }
        // some other core must appear twice, because there are at least as
        // many slots as cores
        let slot = *order
            .iter()
            .find(|&&k| {
                let e = ends[k / 2];
                count[if k % 2 == 0 { e.0 } else { e.1 }] >= 2
            })
            .expect("enough endpoint slots");
        let e = &mut ends[slot / 2];
        let old = if slot % 2 == 0 { std::mem::replace(&mut e.0, core) } else { std::mem::replace(&mut e.1, core) };
        count[old] -= 1;
        count[core] += 1;
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    if lo == hi {
        return lo;
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64 + 1.0).ln());
    let x = rng.gen_range(a..b).exp().floor() as u64;
    x.clamp(lo, hi)
}

/// Log-uniform on whole nanoseconds; a zero lower bound is shifted by one.
fn log_uniform_from_zero(rng: &mut ChaCha8Rng, lo_ps: u64, hi_ps: u64) -> u64 {
    let (lo, hi) = (lo_ps.div_ceil(1_000), hi_ps / 1_000);
    if lo > hi {
        return lo_ps;
    }
    (log_uniform(rng, lo + 1, hi + 1) - 1) * 1_000
}

/// Scales `weights` to integers summing to `total`, each at least 1, by
/// largest remainder.
fn rescale(weights: &[u64], total: u64) -> Vec<u64> {
    let n = weights.len() as u64;
    let spare = total - n;
    let sum: f64 = weights.iter().map(|&w| w as f64).sum();
    let shares: Vec<f64> = weights.iter().map(|&w| w as f64 / sum * spare as f64).collect();
    let mut out: Vec<u64> = shares.iter().map(|s| 1 + s.floor() as u64).collect();
    let mut left = total - out.iter().sum::<u64>();
    let mut by_remainder: Vec<usize> = (0..weights.len()).collect();
    by_remainder.sort_by(|&a, &b| (shares[b] - shares[b].floor()).total_cmp(&(shares[a] - shares[a].floor())).then(a.cmp(&b)));
    for &i in by_remainder.iter().cycle() {
        if left == 0 {
            break;
        }
        out[i] += 1;
        left -= 1;
    }
    out
}

/// A named preset: a mesh and the generator settings of one application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub mesh: Mesh,
    pub config: BenchConfig,
}

/// (mesh, cores, packets, total bits) of the reference suite: eighteen
/// applications over eight mesh sizes.
const SUITE: [((u32, u32), &[(usize, usize, u64)]); 8] = [
    ((3, 2), &[(5, 43, 78_817), (6, 17, 174), (6, 43, 49_003)]),
    ((2, 4), &[(5, 16, 1_600), (7, 33, 23_235), (8, 18, 5_930)]),
    ((3, 3), &[(7, 16, 1_600), (9, 18, 1_860), (9, 32, 43_120)]),
    ((2, 5), &[(8, 24, 2_215), (9, 51, 23_244), (10, 22, 322_221)]),
    ((3, 4), &[(10, 15, 3_100), (12, 25, 2_578_920), (14, 88, 115_778)]),
    ((8, 8), &[(62, 344, 9_799_200)]),
    ((10, 10), &[(93, 415, 562_565_990)]),
    ((12, 10), &[(99, 446, 680_006_120)]),
];

/// Computation times of preset applications.
pub const PRESET_COMP_RANGE: (Time, Time) = (Time::from_ns(5), Time::from_ns(100));

pub const PRESET_MAX_FANOUT: usize = 3;

/// Presets named `WxH/k` (k-th application on that mesh). Volumes are drawn
/// within a factor of four of the mean packet size and rescaled to the
/// listed total. Note that `3x4/3` has more cores than the mesh has tiles.
pub fn reference_presets() -> Vec<Preset> {
    let mut out = Vec::new();
    for ((w, h), apps) in SUITE {
        for (k, &(cores, packets, bits)) in apps.iter().enumerate() {
            let mean = (bits / packets as u64).max(1);
            out.push(Preset {
                name: format!("{w}x{h}/{}", k + 1),
                mesh: Mesh { width: w, height: h },
                config: BenchConfig {
                    n_cores: cores,
                    n_packets: packets,
                    volume_range: ((mean / 4).max(1), mean * 4),
                    comp_range: PRESET_COMP_RANGE,
                    max_fanout: PRESET_MAX_FANOUT,
                    seed: 0,
                    total_bits: Some(bits),
                },
            });
        }
    }
    out
}

/// Looks a preset up by name; a bare mesh size means its first application.
pub fn preset(name: &str) -> Option<Preset> {
    let name = name.trim().to_ascii_lowercase();
    let full = if name.contains('/') { name } else { format!("{name}/1") };
    reference_presets().into_iter().find(|p| p.name == full)
}
