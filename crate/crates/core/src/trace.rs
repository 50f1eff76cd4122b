//! Timing diagrams of a simulation run as text, SVG or CSV.
//!
//! Intervals print as inclusive `[start,last]` in nanoseconds, where `last`
//! is one clock period before the exclusive end. Resource intervals are
//! labelled `bits(src→dst)` and a trailing `*` marks a packet that had been
//! held up by contention.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use crate::graph::{Cdcg, CoreId, PacketId};
use crate::io::LoadError;
use crate::mesh::Resource;
use crate::sim::{BusyInterval, ResourceTimeline, SimReport};
use crate::units::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Svg,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "svg" => Ok(Format::Svg),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown trace format '{other}' (expected text, svg or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneKind {
    Core(CoreId),
    Resource(Resource),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub start: Time,
    /// Exclusive.
    pub end: Time,
    pub packet: PacketId,
    pub bits: u64,
    pub contended: bool,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lane {
    pub name: String,
    pub kind: LaneKind,
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub texec: Time,
    pub lambda: Time,
    /// Cores in id order, then resources in the order the report lists them.
    pub lanes: Vec<Lane>,
}

/// `[start,last]` with `last = end - lambda`.
pub fn inclusive(start: Time, end: Time, lambda: Time) -> String {
    let last = if end.ps() >= start.ps() + lambda.ps() { end - lambda } else { start };
    format!("[{start},{last}]")
}

impl Trace {
    pub fn build(app: &Cdcg, report: &SimReport, lambda: Time) -> Self {
        let names: BTreeMap<CoreId, String> = app.cores.iter().map(|c| (c.id, c.label())).collect();
        let name = |c: CoreId| names.get(&c).cloned().unwrap_or_else(|| c.to_string());
        let ends: BTreeMap<PacketId, (CoreId, CoreId)> = app.packets.iter().map(|p| (p.id, (p.src, p.dst))).collect();

        let mut lanes = Vec::new();
        let mut cores: Vec<&crate::graph::Core> = app.cores.iter().collect();
        cores.sort_by_key(|c| c.id);
        for core in cores {
            let spans = report
                .computations
                .iter()
                .filter(|c| c.core == core.id && c.end > c.start)
                .map(|c| Span {
                    start: c.start,
                    end: c.end,
                    packet: c.packet,
                    bits: 0,
                    contended: false,
                    label: format!("comp({}):{}", c.packet, inclusive(c.start, c.end, lambda)),
                })
                .collect();
            lanes.push(Lane { name: core.label(), kind: LaneKind::Core(core.id), spans });
        }
        for tl in &report.timelines {
            let spans = tl
                .busy
                .iter()
                .map(|b| {
                    let route = ends
                        .get(&b.packet)
                        .map_or_else(|| b.packet.to_string(), |&(s, d)| format!("{}→{}", name(s), name(d)));
                    Span {
                        start: b.start,
                        end: b.end,
                        packet: b.packet,
                        bits: b.bits,
                        contended: b.contended,
                        label: format!(
                            "{}({}):{}{}",
                            b.bits,
                            route,
                            inclusive(b.start, b.end, lambda),
                            if b.contended { "*" } else { "" }
                        ),
                    }
                })
                .collect();
            lanes.push(Lane { name: tl.resource.to_string(), kind: LaneKind::Resource(tl.resource), spans });
        }
        Trace { texec: report.texec, lambda, lanes }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Svg => self.svg(),
            Format::Csv => self.csv(),
        }
    }

    fn header(&self) -> String {
        format!("texec {} ns, clock {} ns", self.texec, self.lambda)
    }

    pub fn text(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        let width = self.lanes.iter().map(|l| l.name.chars().count()).max().unwrap_or(0);
        for lane in &self.lanes {
            let kind = match lane.kind {
                LaneKind::Core(_) => "core",
                LaneKind::Resource(r) => r.kind_name(),
            };
            let labels: Vec<&str> = lane.spans.iter().map(|s| s.label.as_str()).collect();
            let pad = width - lane.name.chars().count();
            let _ = writeln!(s, "{kind:<6} {}{} | {}", lane.name, " ".repeat(pad), labels.join("  ")).map(|_| ());
        }
        // no trailing spaces on empty lanes
        s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
    }

    pub fn svg(&self) -> String {
        const LEFT: f64 = 120.0;
        const PLOT: f64 = 960.0;
        const ROW: f64 = 22.0;
        const TOP: f64 = 30.0;
        let span = self.texec.ps().max(1) as f64;
        let x = |t: Time| LEFT + PLOT * t.ps() as f64 / span;
        let height = TOP + ROW * self.lanes.len() as f64 + 10.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{height:.0}\" font-family=\"monospace\" font-size=\"11\">",
            LEFT + PLOT + 20.0
        );
        let _ = writeln!(s, "<text x=\"4\" y=\"16\">{}</text>", escape(&self.header()));
        for (i, lane) in self.lanes.iter().enumerate() {
            let y = TOP + ROW * i as f64;
            let _ = writeln!(s, "<text x=\"4\" y=\"{:.1}\">{}</text>", y + 14.0, escape(&lane.name));
            let _ = writeln!(
                s,
                "<line x1=\"{LEFT:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#ccc\"/>",
                y + ROW - 1.0,
                LEFT + PLOT,
                y + ROW - 1.0
            );
            for sp in &lane.spans {
                let fill = match (lane.kind, sp.contended) {
                    (LaneKind::Core(_), _) => "#9cc",
                    (_, true) => "#e88",
                    (_, false) => "#8ae",
                };
                let _ = writeln!(
                    s,
                    "<rect x=\"{:.2}\" y=\"{:.1}\" width=\"{:.2}\" height=\"{:.1}\" fill=\"{fill}\" stroke=\"#333\"><title>{}</title></rect>",
                    x(sp.start),
                    y + 2.0,
                    (x(sp.end) - x(sp.start)).max(0.5),
                    ROW - 6.0,
                    escape(&sp.label)
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(["lane", "kind", "resource", "start_ps", "end_ps", "packet", "bits", "contended", "label"])
            .expect("in-memory write");
        for lane in &self.lanes {
            let (kind, resource) = match lane.kind {
                LaneKind::Core(_) => ("core", String::new()),
                LaneKind::Resource(r) => ("resource", serde_json::to_string(&r).expect("serializable")),
            };
            for sp in &lane.spans {
                w.write_record([
                    lane.name.as_str(),
                    kind,
                    resource.as_str(),
                    &sp.start.ps().to_string(),
                    &sp.end.ps().to_string(),
                    &sp.packet.0.to_string(),
                    &sp.bits.to_string(),
                    if sp.contended { "1" } else { "0" },
                    sp.label.as_str(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Deserialize)]
struct CsvRow {
    kind: String,
    resource: String,
    start_ps: u64,
    end_ps: u64,
    packet: u32,
    bits: u64,
    contended: u8,
}

/// Rebuilds the resource timelines from CSV trace output. Resources that
/// were never busy do not appear in the CSV and so are not restored.
pub fn timelines_from_csv(text: &str) -> Result<Vec<ResourceTimeline>, LoadError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out: Vec<ResourceTimeline> = Vec::new();
    for (i, rec) in r.deserialize::<CsvRow>().enumerate() {
        let line = i + 2;
        let row = rec.map_err(|e| LoadError::Parse { line, column: 0, message: e.to_string() })?;
        if row.kind != "resource" {
            continue;
        }
        let resource: Resource = serde_json::from_str(&row.resource)
            .map_err(|e| LoadError::Parse { line, column: 0, message: format!("resource: {e}") })?;
        let busy = BusyInterval {
            start: Time(row.start_ps),
            end: Time(row.end_ps),
            packet: PacketId(row.packet),
            bits: row.bits,
            contended: row.contended != 0,
        };
        match out.last_mut() {
            Some(t) if t.resource == resource => t.busy.push(busy),
            _ => out.push(ResourceTimeline { resource, busy: vec![busy] }),
        }
    }
    Ok(out)
}
