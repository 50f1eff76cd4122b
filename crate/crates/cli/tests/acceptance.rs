//! Acceptance suite: one PASS/FAIL line per criterion, then a non-zero exit
//! if any failed. Runs without the libtest harness so the lines always show.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nocmap::benchgen::{self, generate, BenchConfig};
use nocmap::compare::{compare_all, CompareOptions, Profile, Search};
use nocmap::energy::{edynoc_cdcm, edynoc_cwm, enoc, estnoc, pstnoc};
use nocmap::io::{self, Platform};
use nocmap::mapper::SaParams;
use nocmap::sim::{packet_delay, routing_delay, simulate_with, total_delay, SimOptions};
use nocmap::trace::Trace;
use nocmap::{
    exhaustive_search, fixtures, simulate, simulated_annealing, Cdcg, CoreId, Cwg, Energy, Mapping, Mesh, Model,
    NocParams, Objective, Packet, PacketId, Power, Resource, Tile, Time, Vertex,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance on the 430/426 ratio.
const RATIO_TOLERANCE: f64 = 0.001;
/// Relative tolerance when comparing annealing and exhaustive optima.
const OPTIMUM_TOLERANCE: f64 = 1e-12;
/// Required share of annealing runs that reach the optimum.
const HIT_RATE: f64 = 0.95;
const SA_RUNS: u64 = 20;
const FUZZ_INSTANCES: u64 = 20_000;
const FORMAT_FUZZ_ITERATIONS: u64 = 100_000;
const TREND_APPS_PER_PRESET: u64 = 8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Verdict); 10] = [
        ("golden dynamic energy", Some(Duration::from_secs(1)), golden_dynamic_energy),
        ("golden timing", Some(Duration::from_secs(1)), golden_timing),
        ("golden static and total energy", None, golden_total_energy),
        ("delay identity", Some(Duration::from_secs(1)), delay_identity),
        ("model equivalence", Some(Duration::from_secs(30)), model_equivalence),
        ("annealing reaches the exhaustive optimum", Some(Duration::from_secs(600)), oracle_equivalence),
        ("contention properties", Some(Duration::from_secs(60)), contention_properties),
        ("trend reproduction", Some(Duration::from_secs(900)), trend_reproduction),
        ("determinism", None, determinism),
        ("format robustness", None, format_robustness),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let started = Instant::now();
        let mut v = run();
        let elapsed = started.elapsed();
        if let Some(b) = budget {
            if elapsed > *b {
                v.pass = false;
                v.detail += &format!("; took longer than {} s", b.as_secs());
            }
        }
        println!(
            "criterion {n:>2} {} {name}: {} ({:.2} s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64()
        );
        if !v.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn unit_mesh() -> Mesh {
    Mesh::new(2, 2).unwrap()
}

fn golden_dynamic_energy() -> Verdict {
    let app = fixtures::four_core_app();
    let params = NocParams::unit_example();
    let cwg = Cwg::from_cdcg(&app).unwrap();
    let mut got = Vec::new();
    for m in [fixtures::mapping_contended(), fixtures::mapping_alternate()] {
        got.push(edynoc_cwm(&cwg, &m, &unit_mesh(), &params).unwrap().edy_noc);
        got.push(edynoc_cdcm(&app, &m, &unit_mesh(), &params).unwrap());
        got.push(simulate(&app, &m, &unit_mesh(), &params).unwrap().edy_noc());
    }
    let pass = got.iter().all(|e| *e == Energy::from_pj(390.0));
    let shown: Vec<String> = got.iter().map(|e| e.to_string()).collect();
    verdict(pass, format!("EDyNoC for both mappings under both models and the simulator: {} (expect 390 pJ)", shown.join(", ")))
}

fn router_windows(app: &Cdcg, mapping: &Mapping) -> Vec<String> {
    let r = simulate(app, mapping, &unit_mesh(), &NocParams::unit_example()).unwrap();
    let trace = Trace::build(app, &r, Time::from_ns(1));
    let lane = trace.lanes.iter().find(|l| l.kind == nocmap::trace::LaneKind::Resource(Resource::Router { tile: Tile(4) }));
    lane.map(|l| l.spans.iter().filter(|s| s.label.contains("(E→A)")).map(|s| s.label.clone()).collect()).unwrap_or_default()
}

fn golden_timing() -> Verdict {
    let full = fixtures::four_core_app();
    let chain = {
        let keep = [PacketId(1), PacketId(2)];
        let v = |i| Vertex::Packet(PacketId(i));
        Cdcg::new(
            full.cores.clone(),
            full.packets.iter().filter(|p| keep.contains(&p.id)).cloned().collect(),
            vec![(Vertex::Start, v(1)), (v(1), v(2)), (v(2), Vertex::End)],
        )
    };
    let expected = ["20(E→A):[11,32]", "15(E→A):[57,73]"];
    let a = router_windows(&chain, &fixtures::mapping_contended());
    let b = router_windows(&full, &fixtures::mapping_contended());
    verdict(a == expected && b == expected, format!("τ4 windows, chain alone {a:?}, within the full application {b:?}"))
}

fn golden_total_energy() -> Verdict {
    let mut params = NocParams::unit_example();
    params.ps_router = Power::from_pj_per_ns(0.1);
    let edy = edynoc_cdcm(&fixtures::four_core_app(), &fixtures::mapping_contended(), &unit_mesh(), &params).unwrap();
    let ps = pstnoc(&unit_mesh(), &params);
    let slow = enoc(estnoc(ps, Time::from_ns(100)), edy);
    let fast = enoc(estnoc(ps, Time::from_ns(90)), edy);
    let ratio = slow.0 / fast.0;
    let pass = slow == Energy::from_pj(430.0) && fast == Energy::from_pj(426.0) && (ratio - 1.009).abs() <= RATIO_TOLERANCE;
    verdict(pass, format!("ENoC {slow} at 100 ns vs {fast} at 90 ns, ratio {ratio:.5}"))
}

fn delay_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for _ in 0..10_000 {
        let hops: u64 = rng.gen_range(1..=20);
        let flits: u64 = rng.gen_range(1..=10_000);
        let mut p = NocParams::unit_example();
        p.tr = rng.gen_range(1..=8);
        p.tl = rng.gen_range(1..=8);
        p.lambda = Time(rng.gen_range(1..=10_000));
        let (tr, tl, l) = (p.tr as u64, p.tl as u64, p.lambda.ps());
        let d_r = (hops * (tr + tl) + tl) * l;
        let d_p = tl * (flits - 1) * l;
        let d = (hops * (tr + tl) + tl * flits) * l;
        let ours = (routing_delay(hops as u32, &p), packet_delay(flits, &p), total_delay(hops as u32, flits, &p));
        if d_r + d_p != d || ours != (Time(d_r), Time(d_p), Time(d)) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{bad} mismatches in 10000 draws"))
}

struct Instance {
    app: Cdcg,
    mapping: Mapping,
    mesh: Mesh,
    params: NocParams,
}

fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = Mesh::new(rng.gen_range(2..=5), rng.gen_range(1..=4)).unwrap();
    let n_cores = rng.gen_range(2..=(mesh.tiles() as usize).clamp(2, 12));
    let n_packets = rng.gen_range(n_cores.div_ceil(2)..=24);
    let app = generate(&BenchConfig {
        n_cores,
        n_packets,
        volume_range: (1, 256),
        comp_range: (Time::ZERO, Time::from_ns(40)),
        max_fanout: rng.gen_range(1..=3),
        seed,
        total_bits: None,
    })
    .unwrap();
    let mut tiles: Vec<u32> = (1..=mesh.tiles()).collect();
    tiles.shuffle(&mut rng);
    let mapping = Mapping::new(app.cores.iter().zip(tiles).map(|(c, t)| (c.id, Tile(t)))).unwrap();
    let mut params = NocParams::t007();
    params.tr = rng.gen_range(1..=4);
    params.tl = rng.gen_range(1..=3);
    params.lambda = Time::from_ns(rng.gen_range(1..=3));
    params.flit_width = rng.gen_range(1..=16);
    Instance { app, mapping, mesh, params }
}

fn model_equivalence() -> Verdict {
    let mut bad = Vec::new();
    for seed in 0..200 {
        let i = random_instance(seed);
        let cwm = edynoc_cwm(&Cwg::from_cdcg(&i.app).unwrap(), &i.mapping, &i.mesh, &i.params).unwrap().edy_noc;
        let cdcm = edynoc_cdcm(&i.app, &i.mapping, &i.mesh, &i.params).unwrap();
        let sim = simulate(&i.app, &i.mapping, &i.mesh, &i.params).unwrap().edy_noc();
        if !(cwm == cdcm && cdcm == sim) {
            bad.push(seed);
        }
    }
    verdict(bad.is_empty(), format!("{} of 200 instances disagree {bad:?}", bad.len()))
}

fn oracle_equivalence() -> Verdict {
    let small = ["3x2", "2x4", "3x3", "2x5", "3x4"];
    let params = NocParams::t007();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut skipped = Vec::new();
    for preset in benchgen::reference_presets().into_iter().filter(|p| small.iter().any(|s| p.name.starts_with(&format!("{s}/")))) {
        let app = generate(&preset.config).unwrap();
        if app.cores.len() > preset.mesh.tiles() as usize {
            skipped.push(format!("{} ({} cores on {} tiles)", preset.name, app.cores.len(), preset.mesh.tiles()));
            continue;
        }
        for model in [Model::Cwm, Model::Cdcm] {
            let obj = Objective::new(model, params);
            let best = exhaustive_search(&obj, &app, &preset.mesh).unwrap().best_cost;
            let hits = (0..SA_RUNS)
                .filter(|&seed| {
                    let r = simulated_annealing(&obj, &app, &preset.mesh, &SaParams::with_seed(seed)).unwrap();
                    (r.best_cost.0 - best.0).abs() <= OPTIMUM_TOLERANCE * best.0.abs()
                })
                .count() as u64;
            let ok = hits as f64 >= HIT_RATE * SA_RUNS as f64;
            pass &= ok;
            lines.push(format!("{} {model} {hits}/{SA_RUNS}", preset.name));
        }
    }
    let restarts = SaParams::default().restarts;
    verdict(
        pass && restarts >= 4,
        format!("{restarts} restarts, hits: {}; skipped {}", lines.join(", "), skipped.join(", ")),
    )
}

/// Longest path through the dependence graph with contention-free packet
/// delays, from the delay equation alone.
fn analytic_texec(i: &Instance) -> Time {
    let width = i.mesh.width as i64;
    let hops = |a: Tile, b: Tile| {
        let (ax, ay) = ((a.0 as i64 - 1) % width, (a.0 as i64 - 1) / width);
        let (bx, by) = ((b.0 as i64 - 1) % width, (b.0 as i64 - 1) / width);
        ((ax - bx).abs() + (ay - by).abs() + 1) as u64
    };
    let (tr, tl, l) = (i.params.tr as u64, i.params.tl as u64, i.params.lambda.ps());
    let delay: BTreeMap<PacketId, u64> = i
        .app
        .packets
        .iter()
        .map(|p| {
            let n = p.bits.div_ceil(i.params.flit_width as u64).max(1);
            let eta = hops(i.mapping.tile_of(p.src).unwrap(), i.mapping.tile_of(p.dst).unwrap());
            (p.id, p.comp_time.ps() + (eta * (tr + tl) + tl * n) * l)
        })
        .collect();
    let mut preds: BTreeMap<PacketId, Vec<PacketId>> = BTreeMap::new();
    for &(a, b) in &i.app.deps {
        if let (Vertex::Packet(a), Vertex::Packet(b)) = (a, b) {
            preds.entry(b).or_default().push(a);
        }
    }
    let mut finish: BTreeMap<PacketId, u64> = BTreeMap::new();
    while finish.len() < delay.len() {
        for (&p, &d) in &delay {
            if finish.contains_key(&p) {
                continue;
            }
            let ps = preds.get(&p).map(Vec::as_slice).unwrap_or(&[]);
            if ps.iter().all(|q| finish.contains_key(q)) {
                let ready = ps.iter().map(|q| finish[q]).max().unwrap_or(0);
                finish.insert(p, ready + d);
            }
        }
    }
    Time(finish.values().copied().max().unwrap_or(0))
}

fn routers_of(i: &Instance, src: CoreId, dst: CoreId) -> BTreeSet<u32> {
    let w = i.mesh.width;
    let (a, b) = (i.mapping.tile_of(src).unwrap().0 - 1, i.mapping.tile_of(dst).unwrap().0 - 1);
    let (mut x, mut y) = (a % w, a / w);
    let (tx, ty) = (b % w, b / w);
    let mut out = BTreeSet::from([y * w + x + 1]);
    while x != tx {
        if tx > x { x += 1 } else { x -= 1 }
        out.insert(y * w + x + 1);
    }
    while y != ty {
        if ty > y { y += 1 } else { y -= 1 }
        out.insert(y * w + x + 1);
    }
    out
}

fn contention_properties() -> Verdict {
    let mut overlaps = 0;
    let mut free_mismatch = 0;
    let mut free_instances = 0;
    let mut added = 0;
    let mut decreased = Vec::new();
    let mut decreased_from_free = 0;
    for seed in 0..FUZZ_INSTANCES {
        let i = random_instance(seed);
        let r = simulate(&i.app, &i.mapping, &i.mesh, &i.params).unwrap();
        for tl in &r.timelines {
            if tl.busy.windows(2).any(|w| w[1].start < w[0].end) {
                overlaps += 1;
            }
        }
        let analytic = analytic_texec(&i);
        let free = simulate_with(&i.app, &i.mapping, &i.mesh, &i.params, SimOptions { contention: false }).unwrap();
        let contention_free = r.waits.is_empty();
        if free.texec != analytic || (contention_free && r.texec != analytic) {
            free_mismatch += 1;
        }
        free_instances += contention_free as usize;

        // one extra independent packet whose route shares a router with the
        // existing traffic
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let cores: Vec<CoreId> = i.app.cores.iter().map(|c| c.id).collect();
        let src = *cores.choose(&mut rng).unwrap();
        let dst = *cores.iter().filter(|&&c| c != src).collect::<Vec<_>>().choose(&mut rng).unwrap();
        let used: BTreeSet<u32> = r.timelines.iter().filter_map(|t| match t.resource {
            Resource::Router { tile } => Some(tile.0),
            _ => None,
        }).collect();
        if routers_of(&i, src, *dst).is_disjoint(&used) {
            continue;
        }
        let id = PacketId(i.app.packets.iter().map(|p| p.id.0).max().unwrap() + 1);
        let mut app = i.app.clone();
        app.packets.push(Packet {
            id,
            src,
            dst: *dst,
            comp_time: Time::from_ns(rng.gen_range(0..=40)),
            bits: rng.gen_range(1..=256),
        });
        app.deps.push((Vertex::Start, Vertex::Packet(id)));
        app.deps.push((Vertex::Packet(id), Vertex::End));
        let more = simulate(&app, &i.mapping, &i.mesh, &i.params).unwrap();
        added += 1;
        if more.texec < r.texec {
            decreased_from_free += contention_free as usize;
            decreased.push((seed, r.texec, more.texec));
        }
    }
    let example = decreased
        .first()
        .map(|(s, a, b)| format!("; e.g. instance {s}: {a} ns -> {b} ns"))
        .unwrap_or_default();
    verdict(
        overlaps == 0 && free_mismatch == 0 && decreased.is_empty(),
        format!(
            "{FUZZ_INSTANCES} instances: {overlaps} overlapping intervals, {free_mismatch} mismatches against the analytic \
             longest path ({free_instances} instances had no contention); an added contending packet lowered texec in \
             {} of {added} cases{example} ({decreased_from_free} of them from a contention-free start)",
            decreased.len()
        ),
    )
}

fn trend_reproduction() -> Verdict {
    let mut apps = Vec::new();
    for k in 1..=3 {
        let p = benchgen::preset(&format!("3x3/{k}")).unwrap();
        for seed in 0..TREND_APPS_PER_PRESET {
            let app = generate(&BenchConfig { seed, ..p.config.clone() }).unwrap();
            apps.push((format!("3x3/{k}#{seed}"), app, p.mesh));
        }
    }
    let options = CompareOptions { search: Search::Annealing(SaParams::with_seed(1)), profiles: Profile::defaults(), timings: false };
    let report = compare_all(&apps, &options);
    let all = report.averages.last().unwrap();
    let etr = all.etr;
    let (e035, e007) = (all.ecs_per_profile["t035"], all.ecs_per_profile["t007"]);
    let pass = report.failures.is_empty() && report.rows.len() >= 20 && etr > 0.0 && e007 > e035 && e035 >= 0.0;
    verdict(
        pass,
        format!(
            "{} apps: mean ETR {:.2} %, mean ECS t035 {:.3} %, t007 {:.3} % (reference averages 40 %, 0.65 %, 20 %)",
            report.rows.len(),
            etr * 100.0,
            e035 * 100.0,
            e007 * 100.0
        ),
    )
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn run_cli(args: &[String]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_nocmap"))
        .args(args)
        .env("NOCMAP_PLATFORM_DIR", data("platforms"))
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let fixture = data("fixtures/four_core.json").to_string_lossy().into_owned();
    let mapping_c = data("fixtures/mapping_c.json").to_string_lossy().into_owned();
    let args = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();

    let mut apps = Vec::new();
    for seed in 0..6 {
        let p = d(&format!("gen{seed}.json"));
        run_cli(&args(&format!("generate --preset 3x3/{} --seed {seed} -o {p}", seed % 3 + 1)));
        apps.push(p);
    }
    let app_list = apps.join(" ");
    // {out} is replaced by a per-run output file
    let commands = [
        "generate --cores 9 --packets 30 --seed 5 -o {out}".to_string(),
        "generate --preset 8x8 --seed 1 -o {out}".to_string(),
        format!("map --app {} --platform t007 --mesh 3x3 --model cdcm --seed 7 -o {{out}}", apps[0]),
        format!("map --app {} --platform t035 --mesh 3x3 --model cwm --seed 7 -o {{out}}", apps[1]),
        format!("map --app {fixture} --platform unit --model cdcm --search exhaustive -o {{out}}"),
        format!("evaluate --app {fixture} --platform unit --mapping {mapping_c} --report {{out}}"),
        format!("trace --app {fixture} --platform unit --mapping {mapping_c} --format svg -o {{out}}"),
        format!("trace --app {fixture} --platform unit --mapping {mapping_c} --format csv -o {{out}}"),
        format!("compare --mesh 3x3 --restarts 4 --jobs 1 --app {app_list} --report {{out}}"),
        format!("compare --mesh 3x3 --restarts 4 --app {app_list} --report {{out}}"),
    ];
    let mut differing = Vec::new();
    let mut outputs = Vec::new();
    for (k, c) in commands.iter().enumerate() {
        let mut runs = Vec::new();
        for r in 0..2 {
            let out = d(&format!("out{k}_{r}"));
            let (code, stdout) = run_cli(&args(&c.replace("{out}", &out)));
            runs.push((code, stdout, std::fs::read(&out).unwrap_or_default()));
        }
        if runs[0] != runs[1] || runs[0].0 != 0 {
            differing.push(c.split_whitespace().next().unwrap().to_string() + &format!("#{k}"));
        }
        outputs.push(runs.swap_remove(0));
    }
    // sequential and parallel compare must agree, and so must two compares
    // running at the same time
    if outputs[8].1 != outputs[9].1 || outputs[8].2 != outputs[9].2 {
        differing.push("compare jobs=1 vs default".into());
    }
    let concurrent: Vec<_> = (0..2)
        .map(|r| {
            let out = d(&format!("concurrent{r}"));
            let a = args(&commands[9].replace("{out}", &out));
            (std::thread::spawn(move || run_cli(&a)), out)
        })
        .collect();
    for (h, out) in concurrent {
        let (code, stdout) = h.join().unwrap();
        if code != 0 || stdout != outputs[9].1 || std::fs::read(out).unwrap_or_default() != outputs[9].2 {
            differing.push("concurrent compare".into());
        }
    }
    verdict(differing.is_empty(), format!("{} command lines run twice; differing: {differing:?}", commands.len()))
}

mod mutate {
    use rand::Rng;

    const NUMBERS: [&str; 10] =
        ["0", "-1", "1e400", "18446744073709551616", "4294967297", "0.5", "\"7.25\"", "null", "\"end\"", "{}"];

    pub fn mutate(doc: &[u8], rng: &mut impl Rng) -> Vec<u8> {
        let mut out = doc.to_vec();
        for _ in 0..rng.gen_range(1..=3) {
            if out.is_empty() {
                out.push(rng.gen());
                continue;
            }
            let at = rng.gen_range(0..out.len());
            match rng.gen_range(0..7) {
                0 => out[at] = rng.gen(),
                1 => {
                    out.remove(at);
                }
                2 => out.insert(at, b"{}[],:\"0-e."[rng.gen_range(0..11)]),
                3 => out.truncate(at),
                4 => {
                    let end = (at + rng.gen_range(1..48)).min(out.len());
                    let piece = out[at..end].to_vec();
                    let to = rng.gen_range(0..out.len());
                    out.splice(to..to, piece);
                }
                _ => {
                    let starts: Vec<usize> = (0..out.len())
                        .filter(|&i| out[i].is_ascii_digit() && (i == 0 || !out[i - 1].is_ascii_digit()))
                        .collect();
                    if let Some(&s) = starts.get(rng.gen_range(0..starts.len().max(1))) {
                        let e = (s..out.len()).find(|&i| !out[i].is_ascii_digit()).unwrap_or(out.len());
                        out.splice(s..e, NUMBERS[rng.gen_range(0..NUMBERS.len())].bytes());
                    }
                }
            }
        }
        out
    }
}

fn format_robustness() -> Verdict {
    let app = io::application_to_string(&generate(&benchgen::preset("3x3/3").unwrap().config).unwrap());
    let platform = io::platform_to_string(&Platform::builtin("t007", Mesh::new(3, 3).unwrap()).unwrap());
    let mapping = io::mapping_to_string(&fixtures::mapping_contended());
    let report = {
        let r = simulate(&fixtures::four_core_app(), &fixtures::mapping_contended(), &unit_mesh(), &NocParams::unit_example()).unwrap();
        io::report_to_line(&io::Report::Simulation(Box::new(r)))
    };
    let docs = [app.as_bytes(), platform.as_bytes(), mapping.as_bytes(), report.as_bytes()];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut panics = 0;
    for k in 0..FORMAT_FUZZ_ITERATIONS {
        let which = (k % 4) as usize;
        let bytes = mutate::mutate(docs[which], &mut rng);
        let outcome = std::panic::catch_unwind(|| {
            let category = |e: &io::LoadError| e.category();
            match which {
                0 => io::parse_application(&bytes).map(|_| ()).map_err(|e| category(&e)),
                1 => io::parse_platform(&bytes).map(|_| ()).map_err(|e| category(&e)),
                2 => io::parse_mapping(&bytes).map(|_| ()).map_err(|e| category(&e)),
                _ => io::parse_reports(&bytes).map(|_| ()).map_err(|e| category(&e)),
            }
        });
        match outcome {
            Ok(Ok(())) => *counts.entry("ok").or_default() += 1,
            Ok(Err(c)) => *counts.entry(c).or_default() += 1,
            Err(_) => panics += 1,
        }
    }
    let classified = counts.iter().all(|(k, _)| ["ok", "parse", "validation"].contains(k));
    verdict(
        panics == 0 && classified,
        format!("{FORMAT_FUZZ_ITERATIONS} mutated inputs: {counts:?}, {panics} panics"),
    )
}
