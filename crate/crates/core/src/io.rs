//! Versioned JSON files for applications, platforms and mappings, plus an
//! append-only JSON Lines report log.
//!
//! Every document carries `"format_version"` and `"kind"`. Times are
//! nanoseconds (integers when whole), energies attojoules (integers when
//! exact), static power microwatts. Storing is deterministic: the same value
//! always produces the same bytes.

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::compare::{ComparisonReport, Metrics};
use crate::graph::{Cdcg, Core, CoreId, Packet, PacketId, Vertex, Violation};
use crate::mapper::SearchResult;
use crate::mapping::Mapping;
use crate::mesh::{Mesh, Tile};
use crate::params::NocParams;
use crate::sim::SimReport;
use crate::units::{Energy, Power, Time};

pub const FORMAT_VERSION: u32 = 1;

/// Packets larger than this are rejected on load.
pub const MAX_PACKET_BITS: u64 = 1 << 32;
/// Computation times longer than this are rejected on load.
pub const MAX_COMP_TIME: Time = Time::from_ns(1_000_000_000);

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{}", validation_text(*line, message))]
    Validation { line: Option<usize>, message: String },
}

fn validation_text(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("invalid input at line {l}: {message}"),
        None => format!("invalid input: {message}"),
    }
}

impl LoadError {
    pub fn category(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => "io",
            LoadError::Parse { .. } => "parse",
            LoadError::Validation { .. } => "validation",
        }
    }

    fn parse(e: serde_json::Error) -> Self {
        LoadError::Parse { line: e.line(), column: e.column(), message: strip_position(&e.to_string()) }
    }

    fn invalid(line: Option<usize>, message: impl Into<String>) -> Self {
        LoadError::Validation { line, message: message.into() }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    std::fs::read(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), LoadError> {
    std::fs::write(path, text).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
struct Header {
    format_version: Option<Value>,
    kind: Option<Value>,
}

/// Checks version and kind before the full parse so that a file of another
/// kind or version gets a direct diagnostic.
fn check_header(bytes: &[u8], kind: &str) -> Result<(), LoadError> {
    let h: Header = serde_json::from_slice(bytes).map_err(LoadError::parse)?;
    let text = String::from_utf8_lossy(bytes);
    match h.format_version {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION as u64) => {}
        Some(v) => {
            return Err(LoadError::invalid(
                find_line(&text, None, "\"format_version\""),
                format!("unsupported format_version {v} (expected {FORMAT_VERSION})"),
            ))
        }
        None => return Err(LoadError::invalid(None, "missing format_version")),
    }
    match h.kind {
        Some(Value::String(k)) if k == kind => Ok(()),
        Some(v) => Err(LoadError::invalid(find_line(&text, None, "\"kind\""), format!("expected {} {kind} file, found kind {v}", if kind.starts_with(['a', 'e', 'i', 'o', 'u']) { "an" } else { "a" }))),
        None => Err(LoadError::invalid(None, format!("missing kind (expected \"{kind}\")"))),
    }
}

/// 1-based line of the first occurrence of `needle` (compared with all
/// whitespace removed) after the line holding `section`, skipping `skip`
/// earlier matches.
fn find_nth_line(text: &str, section: Option<&str>, needle: &str, skip: usize) -> Option<usize> {
    let squash = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    let needle = squash(needle);
    let mut lines = text.lines().enumerate();
    if let Some(sec) = section {
        let sec = squash(sec);
        lines.find(|(_, l)| squash(l).contains(&sec))?;
    }
    let mut seen = 0;
    for (i, l) in lines {
        let l = squash(l);
        let mut from = 0;
        while let Some(pos) = l[from..].find(&needle) {
            let end = from + pos + needle.len();
            // `"id":1` must not match `"id":12`
            let boundary = !needle.ends_with(|c: char| c.is_ascii_digit())
                || !l[end..].starts_with(|c: char| c.is_ascii_digit());
            if boundary {
                if seen == skip {
                    return Some(i + 1);
                }
                seen += 1;
            }
            from = end;
        }
    }
    None
}

fn find_line(text: &str, section: Option<&str>, needle: &str) -> Option<usize> {
    find_nth_line(text, section, needle, 0)
}

// ---------------------------------------------------------------------------
// applications

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplicationFile {
    format_version: u32,
    kind: String,
    cores: Vec<CoreEntry>,
    packets: Vec<PacketEntry>,
    deps: Vec<(Vertex, Vertex)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoreEntry {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PacketEntry {
    id: u32,
    src: u32,
    dst: u32,
    comp_time_ns: Time,
    bits: u64,
}

pub fn application_to_string(app: &Cdcg) -> String {
    let file = ApplicationFile {
        format_version: FORMAT_VERSION,
        kind: "application".into(),
        cores: app.cores.iter().map(|c| CoreEntry { id: c.id.0, name: c.name.clone() }).collect(),
        packets: app
            .packets
            .iter()
            .map(|p| PacketEntry { id: p.id.0, src: p.src.0, dst: p.dst.0, comp_time_ns: p.comp_time, bits: p.bits })
            .collect(),
        deps: app.deps.clone(),
    };
    canonical_json(&file)
}

/// Pretty JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize>(v: &T) -> String {
    let v = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_application(bytes: &[u8]) -> Result<Cdcg, LoadError> {
    check_header(bytes, "application")?;
    let file: ApplicationFile = serde_json::from_slice(bytes).map_err(LoadError::parse)?;
    let text = String::from_utf8_lossy(bytes);
    for p in &file.packets {
        if p.bits > MAX_PACKET_BITS || p.comp_time_ns > MAX_COMP_TIME {
            return Err(LoadError::invalid(
                packet_line(&text, PacketId(p.id), 0),
                format!("packet P{} exceeds the supported size ({MAX_PACKET_BITS} bits, {MAX_COMP_TIME} ns)", p.id),
            ));
        }
    }
    let app = Cdcg::new(
        file.cores.into_iter().map(|c| Core { id: CoreId(c.id), name: c.name }).collect(),
        file.packets
            .into_iter()
            .map(|p| Packet {
                id: PacketId(p.id),
                src: CoreId(p.src),
                dst: CoreId(p.dst),
                comp_time: p.comp_time_ns,
                bits: p.bits,
            })
            .collect(),
        file.deps,
    );
    let violations = app.validate();
    if let Some(first) = violations.first() {
        let message = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(LoadError::invalid(violation_line(&text, first), message));
    }
    Ok(app)
}

fn packet_line(text: &str, p: PacketId, skip: usize) -> Option<usize> {
    find_nth_line(text, Some("\"packets\""), &format!("\"id\":{}", p.0), skip)
}

fn vertex_json(v: &Vertex) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn dep_line(text: &str, from: &Vertex, to: &Vertex, skip: usize) -> Option<usize> {
    // deps may be spread over several lines when pretty-printed, so anchor
    // on the opening element and fall back to the section
    let compact = format!("[{},{}]", vertex_json(from), vertex_json(to));
    find_nth_line(text, Some("\"deps\""), &compact, skip).or_else(|| {
        let squashed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let section = squashed.find("\"deps\"")?;
        let mut at = section;
        for _ in 0..=skip {
            at += squashed[at..].find(&compact)? + 1;
        }
        // map the squashed offset back to a line
        let mut count = 0;
        for (i, line) in text.lines().enumerate() {
            count += line.chars().filter(|c| !c.is_whitespace()).count();
            if count >= at {
                return Some(i + 1);
            }
        }
        None
    })
}

fn violation_line(text: &str, v: &Violation) -> Option<usize> {
    match v {
        Violation::DuplicateCore(c) => find_nth_line(text, Some("\"cores\""), &format!("\"id\":{}", c.0), 1),
        Violation::DuplicatePacket(p) => packet_line(text, *p, 1),
        Violation::UnknownPacket { from, to } => dep_line(text, from, to, 0),
        Violation::DuplicateDependence { from, to } => dep_line(text, from, to, 1),
        Violation::EdgeIntoStart { from } => dep_line(text, from, &Vertex::Start, 0),
        Violation::EdgeOutOfEnd { to } => dep_line(text, &Vertex::End, to, 0),
        Violation::StartToEnd => dep_line(text, &Vertex::Start, &Vertex::End, 0),
        Violation::NoPackets => find_line(text, None, "\"packets\""),
        other => other.packet().and_then(|p| packet_line(text, p, 0)),
    }
}

pub fn load_application(path: &Path) -> Result<Cdcg, LoadError> {
    parse_application(&read(path)?)
}

pub fn store_application(app: &Cdcg, path: &Path) -> Result<(), LoadError> {
    write(path, &application_to_string(app))
}

// ---------------------------------------------------------------------------
// platforms

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatformFile {
    format_version: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    mesh: MeshEntry,
    erbit_aj: Energy,
    elbit_aj: Energy,
    ecbit_aj: Energy,
    /// Static power of one router.
    ps_router_uw: f64,
    lambda_ns: Time,
    tr_cycles: u32,
    tl_cycles: u32,
    flit_width_bits: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshEntry {
    width: u32,
    height: u32,
}

/// A mesh together with its technology and timing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Platform {
    pub name: Option<String>,
    pub mesh: Mesh,
    pub params: NocParams,
}

impl Platform {
    /// One of the built-in technology profiles on the given mesh.
    pub fn builtin(name: &str, mesh: Mesh) -> Option<Self> {
        NocParams::preset(name).map(|params| Platform { name: Some(name.to_string()), mesh, params })
    }
}

pub fn platform_to_string(p: &Platform) -> String {
    let file = PlatformFile {
        format_version: FORMAT_VERSION,
        kind: "platform".into(),
        name: p.name.clone(),
        mesh: MeshEntry { width: p.mesh.width, height: p.mesh.height },
        erbit_aj: p.params.erbit,
        elbit_aj: p.params.elbit,
        ecbit_aj: p.params.ecbit,
        ps_router_uw: p.params.ps_router.0,
        lambda_ns: p.params.lambda,
        tr_cycles: p.params.tr,
        tl_cycles: p.params.tl,
        flit_width_bits: p.params.flit_width,
    };
    canonical_json(&file)
}

pub fn parse_platform(bytes: &[u8]) -> Result<Platform, LoadError> {
    check_header(bytes, "platform")?;
    let f: PlatformFile = serde_json::from_slice(bytes).map_err(LoadError::parse)?;
    let text = String::from_utf8_lossy(bytes);
    let mesh = Mesh::new(f.mesh.width, f.mesh.height)
        .map_err(|e| LoadError::invalid(find_line(&text, None, "\"mesh\""), e.to_string()))?;
    let params = NocParams {
        erbit: f.erbit_aj,
        elbit: f.elbit_aj,
        ecbit: f.ecbit_aj,
        ps_router: Power(f.ps_router_uw),
        lambda: f.lambda_ns,
        tr: f.tr_cycles,
        tl: f.tl_cycles,
        flit_width: f.flit_width_bits,
    };
    params.validate().map_err(|e| LoadError::invalid(None, e.to_string()))?;
    Ok(Platform { name: f.name, mesh, params })
}

pub fn load_platform(path: &Path) -> Result<Platform, LoadError> {
    parse_platform(&read(path)?)
}

pub fn store_platform(p: &Platform, path: &Path) -> Result<(), LoadError> {
    write(path, &platform_to_string(p))
}

// ---------------------------------------------------------------------------
// mappings

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingFile {
    format_version: u32,
    kind: String,
    assignment: Vec<AssignmentEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentEntry {
    core: u32,
    tile: u32,
}

pub fn mapping_to_string(m: &Mapping) -> String {
    let file = MappingFile {
        format_version: FORMAT_VERSION,
        kind: "mapping".into(),
        assignment: m.iter().map(|(c, t)| AssignmentEntry { core: c.0, tile: t.0 }).collect(),
    };
    canonical_json(&file)
}

pub fn parse_mapping(bytes: &[u8]) -> Result<Mapping, LoadError> {
    check_header(bytes, "mapping")?;
    let f: MappingFile = serde_json::from_slice(bytes).map_err(LoadError::parse)?;
    let text = String::from_utf8_lossy(bytes);
    let mut seen = std::collections::BTreeSet::new();
    for a in &f.assignment {
        if !seen.insert(a.core) {
            return Err(LoadError::invalid(
                find_nth_line(&text, Some("\"assignment\""), &format!("\"core\":{}", a.core), 1),
                format!("core C{} is assigned more than once", a.core),
            ));
        }
        if a.tile == 0 {
            return Err(LoadError::invalid(
                find_line(&text, Some("\"assignment\""), &format!("\"core\":{}", a.core)),
                format!("core C{} is assigned to tile 0; tiles are numbered from 1", a.core),
            ));
        }
    }
    Mapping::new(f.assignment.iter().map(|a| (CoreId(a.core), Tile(a.tile)))).map_err(|e| {
        let line = match &e {
            crate::Error::TileCollision { second, .. } => {
                find_line(&text, Some("\"assignment\""), &format!("\"core\":{}", second.0))
            }
            _ => None,
        };
        LoadError::invalid(line, e.to_string())
    })
}

pub fn load_mapping(path: &Path) -> Result<Mapping, LoadError> {
    parse_mapping(&read(path)?)
}

pub fn store_mapping(m: &Mapping, path: &Path) -> Result<(), LoadError> {
    write(path, &mapping_to_string(m))
}

// ---------------------------------------------------------------------------
// reports

/// One entry of a report log.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Simulation(Box<SimReport>),
    Search(SearchResult),
    Evaluation(Metrics),
    Comparison(ComparisonReport),
}

impl Report {
    pub fn kind(&self) -> &'static str {
        match self {
            Report::Simulation(_) => "simulation",
            Report::Search(_) => "search",
            Report::Evaluation(_) => "evaluation",
            Report::Comparison(_) => "comparison",
        }
    }
}

#[derive(Serialize)]
struct Line<'a, T> {
    format_version: u32,
    kind: &'a str,
    report: &'a T,
}

/// One JSON Lines record, newline included.
pub fn report_to_line(r: &Report) -> String {
    fn line<T: Serialize>(kind: &str, report: &T) -> String {
        let v = serde_json::to_value(Line { format_version: FORMAT_VERSION, kind, report }).expect("serializable");
        let mut s = serde_json::to_string(&v).expect("serializable");
        s.push('\n');
        s
    }
    match r {
        Report::Simulation(x) => line(r.kind(), x.as_ref()),
        Report::Search(x) => line(r.kind(), x),
        Report::Evaluation(x) => line(r.kind(), x),
        Report::Comparison(x) => line(r.kind(), x),
    }
}

pub fn parse_reports(bytes: &[u8]) -> Result<Vec<Report>, LoadError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let before = &bytes[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        LoadError::Parse { line, column, message: "invalid UTF-8".into() }
    })?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let relocate = |e: serde_json::Error| LoadError::Parse { line: n, column: e.column(), message: strip_position(&e.to_string()) };
        let mut v: Value = serde_json::from_str(raw).map_err(relocate)?;
        match v.get("format_version").and_then(Value::as_u64) {
            Some(x) if x == FORMAT_VERSION as u64 => {}
            _ => return Err(LoadError::invalid(Some(n), "missing or unsupported format_version")),
        }
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or_default().to_string();
        let body = v.get_mut("report").map(Value::take).ok_or_else(|| LoadError::invalid(Some(n), "missing report"))?;
        fn decode<T: DeserializeOwned>(body: Value, n: usize) -> Result<T, LoadError> {
            serde_json::from_value(body).map_err(|e| LoadError::Parse { line: n, column: 0, message: e.to_string() })
        }
        out.push(match kind.as_str() {
            "simulation" => Report::Simulation(Box::new(decode(body, n)?)),
            "search" => Report::Search(decode(body, n)?),
            "evaluation" => Report::Evaluation(decode(body, n)?),
            "comparison" => Report::Comparison(decode(body, n)?),
            other => return Err(LoadError::invalid(Some(n), format!("unknown report kind '{other}'"))),
        });
    }
    Ok(out)
}

/// Appends one record to the log at `path`, creating it if needed.
pub fn store_report(r: &Report, path: &Path) -> Result<(), LoadError> {
    let io = |source| LoadError::Io { path: path.to_path_buf(), source };
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    f.write_all(report_to_line(r).as_bytes()).map_err(io)
}

pub fn load_reports(path: &Path) -> Result<Vec<Report>, LoadError> {
    parse_reports(&read(path)?)
}
