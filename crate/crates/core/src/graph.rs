//! Application graphs.
//!
//! [`Cdcg`] is the packet-level dependence graph: one vertex per packet, an
//! edge `p -> q` meaning `q`'s originating core can only start computing
//! after `p` has been fully delivered, and two pseudo-vertices `Start` and
//! `End`. [`Cwg`] is the aggregate view: one edge per communicating ordered
//! core pair, weighted by the total number of bits exchanged.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::units::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoreId(pub u32);

impl fmt::Display for CoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PacketId(pub u32);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Core {
    pub id: CoreId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Core {
    pub fn new(id: u32) -> Self {
        Core { id: CoreId(id), name: None }
    }

    pub fn named(id: u32, name: &str) -> Self {
        Core { id: CoreId(id), name: Some(name.to_string()) }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.id.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub src: CoreId,
    pub dst: CoreId,
    /// Computation of the source core before the packet is sent.
    pub comp_time: Time,
    pub bits: u64,
}

/// Endpoint of a dependence edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Start,
    Packet(PacketId),
    End,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Start => f.write_str("Start"),
            Vertex::End => f.write_str("End"),
            Vertex::Packet(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Vertex::Start => s.serialize_str("start"),
            Vertex::End => s.serialize_str("end"),
            Vertex::Packet(p) => s.serialize_u32(p.0),
        }
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Vertex;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a packet id, \"start\" or \"end\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Vertex, E> {
                u32::try_from(v)
                    .map(|v| Vertex::Packet(PacketId(v)))
                    .map_err(|_| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Vertex, E> {
                u32::try_from(v)
                    .map(|v| Vertex::Packet(PacketId(v)))
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Vertex, E> {
                match v {
                    "start" => Ok(Vertex::Start),
                    "end" => Ok(Vertex::End),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A structural problem found by [`Cdcg::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateCore(CoreId),
    DuplicatePacket(PacketId),
    UnknownCore { packet: PacketId, core: CoreId },
    SelfCommunication(PacketId),
    EmptyPacket(PacketId),
    UnknownPacket { from: Vertex, to: Vertex },
    DuplicateDependence { from: Vertex, to: Vertex },
    EdgeIntoStart { from: Vertex },
    EdgeOutOfEnd { to: Vertex },
    StartToEnd,
    Cycle(Vec<PacketId>),
    UnreachableFromStart(PacketId),
    CannotReachEnd(PacketId),
    /// No packets at all, so `End` cannot be reached from `Start`.
    NoPackets,
}

impl Violation {
    /// The packet the violation is anchored to, if any.
    pub fn packet(&self) -> Option<PacketId> {
        match self {
            Violation::DuplicatePacket(p)
            | Violation::UnknownCore { packet: p, .. }
            | Violation::SelfCommunication(p)
            | Violation::EmptyPacket(p)
            | Violation::UnreachableFromStart(p)
            | Violation::CannotReachEnd(p) => Some(*p),
            Violation::Cycle(ps) => ps.first().copied(),
            Violation::UnknownPacket { from, to }
            | Violation::DuplicateDependence { from, to } => match (from, to) {
                (Vertex::Packet(p), _) | (_, Vertex::Packet(p)) => Some(*p),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCore(c) => write!(f, "core {c} defined more than once"),
            Violation::DuplicatePacket(p) => write!(f, "packet {p} defined more than once"),
            Violation::UnknownCore { packet, core } => write!(f, "packet {packet} refers to unknown core {core}"),
            Violation::SelfCommunication(p) => write!(f, "packet {p} has the same source and destination core"),
            Violation::EmptyPacket(p) => write!(f, "packet {p} carries no bits"),
            Violation::UnknownPacket { from, to } => write!(f, "dependence {from}->{to} refers to an unknown packet"),
            Violation::DuplicateDependence { from, to } => write!(f, "dependence {from}->{to} listed more than once"),
            Violation::EdgeIntoStart { from } => write!(f, "dependence {from}->Start: Start cannot have predecessors"),
            Violation::EdgeOutOfEnd { to } => write!(f, "dependence End->{to}: End cannot have successors"),
            Violation::StartToEnd => write!(f, "dependence Start->End bypasses every packet"),
            Violation::Cycle(ps) => {
                let names: Vec<_> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "dependence cycle through {}", names.join(" -> "))
            }
            Violation::UnreachableFromStart(p) => write!(f, "packet {p} is not reachable from Start"),
            Violation::CannotReachEnd(p) => write!(f, "End is not reachable from packet {p}"),
            Violation::NoPackets => write!(f, "no packets: End is unreachable from Start"),
        }
    }
}

/// Communication dependence and computation graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cdcg {
    pub cores: Vec<Core>,
    pub packets: Vec<Packet>,
    pub deps: Vec<(Vertex, Vertex)>,
}

impl Cdcg {
    pub fn new(cores: Vec<Core>, packets: Vec<Packet>, deps: Vec<(Vertex, Vertex)>) -> Self {
        Cdcg { cores, packets, deps }
    }

    pub fn core(&self, id: CoreId) -> Option<&Core> {
        self.cores.iter().find(|c| c.id == id)
    }

    pub fn packet(&self, id: PacketId) -> Option<&Packet> {
        self.packets.iter().find(|p| p.id == id)
    }

    pub fn total_bits(&self) -> u64 {
        self.packets.iter().map(|p| p.bits).sum()
    }

    /// Every violated invariant; an empty list means the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut cores = HashSet::new();
        for c in &self.cores {
            if !cores.insert(c.id) {
                out.push(Violation::DuplicateCore(c.id));
            }
        }

        let mut packets = HashSet::new();
        for p in &self.packets {
            if !packets.insert(p.id) {
                out.push(Violation::DuplicatePacket(p.id));
            }
            for core in [p.src, p.dst] {
                if !cores.contains(&core) {
                    out.push(Violation::UnknownCore { packet: p.id, core });
                }
            }
            if p.src == p.dst {
                out.push(Violation::SelfCommunication(p.id));
            }
            if p.bits == 0 {
                out.push(Violation::EmptyPacket(p.id));
            }
        }

        let mut seen = HashSet::new();
        let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
        for &(from, to) in &self.deps {
            if !seen.insert((from, to)) {
                out.push(Violation::DuplicateDependence { from, to });
                continue;
            }
            let known = |v: Vertex| match v {
                Vertex::Packet(p) => packets.contains(&p),
                _ => true,
            };
            if !known(from) || !known(to) {
                out.push(Violation::UnknownPacket { from, to });
                continue;
            }
            match (from, to) {
                (_, Vertex::Start) => out.push(Violation::EdgeIntoStart { from }),
                (Vertex::End, _) => out.push(Violation::EdgeOutOfEnd { to }),
                (Vertex::Start, Vertex::End) => out.push(Violation::StartToEnd),
                _ => edges.push((from, to)),
            }
        }

        // Only well-formed edges among known packets take part in the
        // acyclicity and reachability checks.
        let mut ids: Vec<PacketId> = packets.iter().copied().collect();
        ids.sort();
        let mut succ: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        let mut pred: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        for &(a, b) in &edges {
            succ.entry(a).or_default().push(b);
            pred.entry(b).or_default().push(a);
        }

        for cycle in find_cycles(&ids, &succ) {
            out.push(Violation::Cycle(cycle));
        }

        let forward = reach(Vertex::Start, &succ);
        let backward = reach(Vertex::End, &pred);
        for &p in &ids {
            if !forward.contains(&Vertex::Packet(p)) {
                out.push(Violation::UnreachableFromStart(p));
            }
            if !backward.contains(&Vertex::Packet(p)) {
                out.push(Violation::CannotReachEnd(p));
            }
        }
        if ids.is_empty() {
            out.push(Violation::NoPackets);
        }
        out
    }

    /// Rejects the graph unless it is valid. A graph with no packets at all
    /// is accepted here so that evaluators treat it as zero traffic.
    pub fn ensure_valid(&self) -> Result<()> {
        let v: Vec<_> = self.validate().into_iter().filter(|v| *v != Violation::NoPackets).collect();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCdcg(v))
        }
    }

    /// Packets in a dependence-respecting order (Kahn, smallest id first).
    pub fn topological_order(&self) -> Result<Vec<PacketId>> {
        self.ensure_valid()?;
        let mut indeg: BTreeMap<PacketId, usize> = self.packets.iter().map(|p| (p.id, 0)).collect();
        let mut succ: HashMap<PacketId, Vec<PacketId>> = HashMap::new();
        for &(a, b) in &self.deps {
            if let (Vertex::Packet(a), Vertex::Packet(b)) = (a, b) {
                succ.entry(a).or_default().push(b);
                *indeg.get_mut(&b).expect("validated") += 1;
            }
        }
        let mut ready: BTreeSet<PacketId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&p, _)| p).collect();
        let mut order = Vec::with_capacity(self.packets.len());
        while let Some(p) = ready.pop_first() {
            order.push(p);
            for &q in succ.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&q).expect("validated");
                *d -= 1;
                if *d == 0 {
                    ready.insert(q);
                }
            }
        }
        Ok(order)
    }

    /// Direct predecessors of each packet (Start omitted).
    pub fn predecessors(&self) -> BTreeMap<PacketId, Vec<PacketId>> {
        let mut out: BTreeMap<PacketId, Vec<PacketId>> = self.packets.iter().map(|p| (p.id, Vec::new())).collect();
        for &(a, b) in &self.deps {
            if let (Vertex::Packet(a), Vertex::Packet(b)) = (a, b) {
                if let Some(v) = out.get_mut(&b) {
                    v.push(a);
                }
            }
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    /// Number of dependence edges plus packets, the size driver of a
    /// timing-aware evaluation.
    pub fn ndp(&self) -> usize {
        self.packets.len() + self.deps.len()
    }
}

fn reach(root: Vertex, adj: &HashMap<Vertex, Vec<Vertex>>) -> HashSet<Vertex> {
    let mut seen = HashSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// One representative cycle per strongly connected component that is
/// cyclic (size > 1 or a self-loop). Iterative Tarjan.
fn find_cycles(ids: &[PacketId], succ: &HashMap<Vertex, Vec<Vertex>>) -> Vec<Vec<PacketId>> {
    let n = ids.len();
    let pos: HashMap<PacketId, usize> = ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&p| {
            let mut v: Vec<usize> = succ
                .get(&Vertex::Packet(p))
                .map(Vec::as_slice)
                .unwrap_or(&[])
                .iter()
                .filter_map(|w| match w {
                    Vertex::Packet(q) => pos.get(q).copied(),
                    _ => None,
                })
                .collect();
            v.sort_unstable();
            v
        })
        .collect();

    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut out = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if comp.len() > 1 || adj[v].contains(&v) {
                        comp.sort_unstable();
                        out.push(comp.into_iter().map(|i| ids[i]).collect());
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Communication weighted graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cwg {
    pub cores: Vec<Core>,
    /// Bits sent per ordered (source, destination) pair; never zero.
    pub edges: BTreeMap<(CoreId, CoreId), u64>,
}

impl Cwg {
    /// Builds a CWG from explicit edges, rejecting zero weights, self
    /// edges and repeated pairs.
    pub fn new(cores: Vec<Core>, edges: impl IntoIterator<Item = (CoreId, CoreId, u64)>) -> Result<Self> {
        let known: HashSet<CoreId> = cores.iter().map(|c| c.id).collect();
        let mut map = BTreeMap::new();
        for (a, b, w) in edges {
            for c in [a, b] {
                if !known.contains(&c) {
                    return Err(Error::UnknownCore(c));
                }
            }
            if w == 0 || a == b {
                return Err(Error::InvalidParams(format!("edge {a}->{b} must join distinct cores with a non-zero weight")));
            }
            if map.insert((a, b), w).is_some() {
                return Err(Error::InvalidParams(format!("edge {a}->{b} repeated")));
            }
        }
        Ok(Cwg { cores, edges: map })
    }

    /// Aggregates a CDCG: the weight of `a -> b` is the sum of the bits of
    /// every packet sent from `a` to `b`.
    pub fn from_cdcg(cdcg: &Cdcg) -> Result<Self> {
        cdcg.ensure_valid()?;
        let mut edges = BTreeMap::new();
        for p in &cdcg.packets {
            *edges.entry((p.src, p.dst)).or_insert(0) += p.bits;
        }
        Ok(Cwg { cores: cdcg.cores.clone(), edges })
    }

    pub fn total_bits(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Number of communicating core pairs.
    pub fn ncc(&self) -> usize {
        self.edges.len()
    }
}
