//! CWM-chosen versus CDCM-chosen mappings, both judged by the simulator.

use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contention::{contention_stats, ContentionStats};
use crate::error::Result;
use crate::graph::{Cdcg, Cwg};
use crate::mapper::{exhaustive_search, simulated_annealing, Model, Objective, SaParams, SearchResult};
use crate::mapping::Mapping;
use crate::mesh::Mesh;
use crate::params::NocParams;
use crate::sim::{simulate, SimReport};
use crate::units::{Energy, Time};

/// Headline figures of one simulated mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub texec: Time,
    pub edy_noc: Energy,
    pub est_noc: Energy,
    pub enoc: Energy,
    pub contention: ContentionStats,
}

impl Metrics {
    pub fn from_report(r: &SimReport) -> Self {
        Metrics {
            texec: r.texec,
            edy_noc: r.edy_noc(),
            est_noc: r.est_noc(),
            enoc: r.enoc(),
            contention: contention_stats(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Search {
    Annealing(SaParams),
    Exhaustive,
}

impl Search {
    pub fn run(&self, objective: &Objective, app: &Cdcg, mesh: &Mesh) -> Result<SearchResult> {
        match self {
            Search::Annealing(p) => simulated_annealing(objective, app, mesh, p),
            Search::Exhaustive => exhaustive_search(objective, app, mesh),
        }
    }
}

/// A named technology profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub params: NocParams,
}

impl Profile {
    pub fn new(name: &str, params: NocParams) -> Self {
        Profile { name: name.to_string(), params }
    }

    /// "t035" and "t007".
    pub fn defaults() -> Vec<Profile> {
        vec![Profile::new("t035", NocParams::t035()), Profile::new("t007", NocParams::t007())]
    }
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub search: Search,
    /// The first profile also provides the row's execution-time reduction.
    pub profiles: Vec<Profile>,
    /// Record search wall time; off by default so reports are reproducible.
    pub timings: bool,
}

/// Mapping picked by one model, measured by the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chosen {
    pub mapping: Mapping,
    /// Cost the search optimised, in its own model.
    pub search_cost: Energy,
    pub texec: Time,
    pub enoc: Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileComparison {
    pub profile: String,
    pub cwm: Chosen,
    pub cdcm: Chosen,
    pub etr: f64,
    pub ecs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_time_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub app: String,
    pub noc_size: String,
    /// Core pairs that communicate.
    pub ncc: usize,
    /// Packets plus dependences.
    pub ndp: usize,
    pub etr: f64,
    pub ecs_per_profile: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_time_ratio: Option<f64>,
    pub profiles: Vec<ProfileComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    /// A mesh size, or "all".
    pub noc_size: String,
    pub apps: usize,
    pub etr: f64,
    pub ecs_per_profile: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_time_ratio: Option<f64>,
    pub ncc: f64,
    pub ndp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub app: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Sorted by application name.
    pub rows: Vec<ComparisonRow>,
    /// One row per mesh size, then the overall average.
    pub averages: Vec<AverageRow>,
    pub failures: Vec<Failure>,
}

/// Relative reduction from `base` to `new`; zero when `base` is zero.
pub fn reduction(base: f64, new: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (base - new) / base
    }
}

fn ratio(cdcm: Duration, cwm: Duration) -> f64 {
    if cwm.is_zero() {
        0.0
    } else {
        cdcm.as_secs_f64() / cwm.as_secs_f64()
    }
}

fn measure(app: &Cdcg, mesh: &Mesh, params: &NocParams, r: &SearchResult) -> Result<Chosen> {
    let report = simulate(app, &r.best_mapping, mesh, params)?;
    Ok(Chosen { mapping: r.best_mapping.clone(), search_cost: r.best_cost, texec: report.texec, enoc: report.enoc() })
}

pub fn compare_app(name: &str, app: &Cdcg, mesh: &Mesh, options: &CompareOptions) -> Result<ComparisonRow> {
    let mut profiles = Vec::with_capacity(options.profiles.len());
    for profile in &options.profiles {
        let run = |model| -> Result<(Chosen, Duration)> {
            let r = options.search.run(&Objective::new(model, profile.params), app, mesh)?;
            Ok((measure(app, mesh, &profile.params, &r)?, r.wall_time))
        };
        let (cwm, cwm_time) = run(Model::Cwm)?;
        let (cdcm, cdcm_time) = run(Model::Cdcm)?;
        profiles.push(ProfileComparison {
            profile: profile.name.clone(),
            etr: reduction(cwm.texec.ps() as f64, cdcm.texec.ps() as f64),
            ecs: reduction(cwm.enoc.0, cdcm.enoc.0),
            cpu_time_ratio: options.timings.then(|| ratio(cdcm_time, cwm_time)),
            cwm,
            cdcm,
        });
    }
    let cpu = options.timings.then(|| mean(profiles.iter().filter_map(|p| p.cpu_time_ratio)));
    Ok(ComparisonRow {
        app: name.to_string(),
        noc_size: mesh.to_string(),
        ncc: Cwg::from_cdcg(app)?.ncc(),
        ndp: app.ndp(),
        etr: profiles.first().map_or(0.0, |p| p.etr),
        ecs_per_profile: profiles.iter().map(|p| (p.profile.clone(), p.ecs)).collect(),
        cpu_time_ratio: cpu,
        profiles,
    })
}

/// Compares every application, in parallel, and averages per mesh size.
/// Errors are collected per application; the table covers the rest.
pub fn compare_all(apps: &[(String, Cdcg, Mesh)], options: &CompareOptions) -> ComparisonReport {
    let results: Vec<(String, Result<ComparisonRow>)> =
        apps.par_iter().map(|(name, app, mesh)| (name.clone(), compare_app(name, app, mesh, options))).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (app, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(Failure { app, error: e.to_string() }),
        }
    }
    rows.sort_by(|a, b| a.app.cmp(&b.app));
    failures.sort_by(|a, b| a.app.cmp(&b.app));
    ComparisonReport { averages: averages(&rows), rows, failures }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn average(noc_size: String, rows: &[&ComparisonRow]) -> AverageRow {
    let mut profiles: Vec<&String> = rows.iter().flat_map(|r| r.ecs_per_profile.keys()).collect();
    profiles.sort();
    profiles.dedup();
    AverageRow {
        noc_size,
        apps: rows.len(),
        etr: mean(rows.iter().map(|r| r.etr)),
        ecs_per_profile: profiles
            .into_iter()
            .map(|p| (p.clone(), mean(rows.iter().filter_map(|r| r.ecs_per_profile.get(p).copied()))))
            .collect(),
        cpu_time_ratio: rows
            .iter()
            .all(|r| r.cpu_time_ratio.is_some())
            .then(|| mean(rows.iter().filter_map(|r| r.cpu_time_ratio))),
        ncc: mean(rows.iter().map(|r| r.ncc as f64)),
        ndp: mean(rows.iter().map(|r| r.ndp as f64)),
    }
}

pub fn averages(rows: &[ComparisonRow]) -> Vec<AverageRow> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut by_size: BTreeMap<(u64, &str), Vec<&ComparisonRow>> = BTreeMap::new();
    for r in rows {
        by_size.entry((tiles_of(&r.noc_size), r.noc_size.as_str())).or_default().push(r);
    }
    let mut out: Vec<AverageRow> = by_size.into_iter().map(|((_, size), rs)| average(size.to_string(), &rs)).collect();
    out.push(average("all".into(), &rows.iter().collect::<Vec<_>>()));
    out
}

fn tiles_of(size: &str) -> u64 {
    size.split_once('x')
        .and_then(|(w, h)| Some(w.parse::<u64>().ok()? * h.parse::<u64>().ok()?))
        .unwrap_or(u64::MAX)
}

/// Re-simulates the stored mappings of a row and returns the reductions
/// they imply, per profile, as (etr, ecs).
pub fn recompute(row: &ComparisonRow, app: &Cdcg, mesh: &Mesh, profiles: &[Profile]) -> Result<Vec<(f64, f64)>> {
    row.profiles
        .iter()
        .map(|pc| {
            let params = profiles
                .iter()
                .find(|p| p.name == pc.profile)
                .map(|p| p.params)
                .ok_or_else(|| crate::Error::InvalidParams(format!("unknown profile '{}'", pc.profile)))?;
            let cwm = simulate(app, &pc.cwm.mapping, mesh, &params)?;
            let cdcm = simulate(app, &pc.cdcm.mapping, mesh, &params)?;
            Ok((
                reduction(cwm.texec.ps() as f64, cdcm.texec.ps() as f64),
                reduction(cwm.enoc().0, cdcm.enoc().0),
            ))
        })
        .collect()
}

/// Fixed-width table: one line per application, then the averages.
pub fn render_table(report: &ComparisonReport) -> String {
    use std::fmt::Write as _;
    let profiles: Vec<String> = {
        let mut p: Vec<String> = report.rows.iter().flat_map(|r| r.profiles.iter().map(|p| p.profile.clone())).collect();
        let mut seen = std::collections::BTreeSet::new();
        p.retain(|x| seen.insert(x.clone()));
        p
    };
    let timings = report.rows.iter().any(|r| r.cpu_time_ratio.is_some());
    let mut s = String::new();
    let _ = write!(s, "{:<16} {:>7} {:>5} {:>5} {:>8}", "app", "noc", "ncc", "ndp", "etr%");
    for p in &profiles {
        let _ = write!(s, " {:>9}", format!("ecs_{p}%"));
    }
    if timings {
        let _ = write!(s, " {:>8}", "cpu");
    }
    s.push('\n');
    let pct = |x: f64| format!("{:.2}", x * 100.0);
    for r in &report.rows {
        let _ = write!(s, "{:<16} {:>7} {:>5} {:>5} {:>8}", r.app, r.noc_size, r.ncc, r.ndp, pct(r.etr));
        for p in &profiles {
            let _ = write!(s, " {:>9}", r.ecs_per_profile.get(p).map_or("-".into(), |x| pct(*x)));
        }
        if let Some(c) = r.cpu_time_ratio {
            let _ = write!(s, " {:>8.3}", c);
        }
        s.push('\n');
    }
    for a in &report.averages {
        let _ = write!(s, "{:<16} {:>7} {:>5.1} {:>5.1} {:>8}", format!("mean({})", a.apps), a.noc_size, a.ncc, a.ndp, pct(a.etr));
        for p in &profiles {
            let _ = write!(s, " {:>9}", a.ecs_per_profile.get(p).map_or("-".into(), |x| pct(*x)));
        }
        if let Some(c) = a.cpu_time_ratio {
            let _ = write!(s, " {:>8.3}", c);
        }
        s.push('\n');
    }
    for f in &report.failures {
        let _ = writeln!(s, "{}: failed: {}", f.app, f.error);
    }
    s
}
