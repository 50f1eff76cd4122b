//! The `nocmap` command line.
//!
//! Exit codes: 0 success, 1 file access, 2 bad flags, 3 infeasible or too
//! large an instance, 4 invalid input files or inconsistent models.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nocmap::benchgen::{self, BenchConfig};
use nocmap::compare::{self, CompareOptions, Profile, Search};
use nocmap::io::{self, LoadError, Platform, Report};
use nocmap::mapper::exhaustive::{exhaustive_search_with_limit, DEFAULT_ENUMERATION_LIMIT};
use nocmap::mapper::SaParams;
use nocmap::trace::{Format, Trace};
use nocmap::{simulate, simulated_annealing, Cdcg, Error, Mapping, Mesh, Metrics, Model, NocParams, Objective, Time};

pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooManyCores { .. } | Error::InstanceTooLarge { .. } | Error::Infeasible(_) | Error::Overflow(_) => {
                EXIT_INFEASIBLE
            }
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Load errors keep the file name in front.
fn load_failure(path: &Path, e: LoadError) -> Failure {
    match e {
        LoadError::Io { .. } => Failure { code: EXIT_IO, message: e.to_string() },
        _ => Failure { code: EXIT_INVALID, message: format!("{}: {e}", path.display()) },
    }
}

type Outcome<T = ()> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "nocmap", version, about = "Map application cores onto mesh network-on-chip tiles")]
pub struct Cli {
    /// Directory searched for `<name>.json` platform files
    #[arg(long, global = true, env = "NOCMAP_PLATFORM_DIR", value_name = "DIR")]
    pub platform_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic application
    Generate(GenerateArgs),
    /// Search for a low-energy mapping
    Map(MapArgs),
    /// Simulate one mapping and report time and energy
    Evaluate(EvaluateArgs),
    /// Compare mappings chosen with and without timing information
    Compare(CompareArgs),
    /// Draw the timing diagram of one mapping
    Trace(TraceArgs),
}

#[derive(Args, Debug)]
pub struct Target {
    /// Application file
    #[arg(long, value_name = "FILE")]
    pub app: PathBuf,

    /// Platform file, a name in the platform directory, or a built-in
    /// profile (t035, t007, unit)
    #[arg(long, default_value = "t035")]
    pub platform: String,

    /// Mesh size, e.g. 3x3; overrides the platform file
    #[arg(long, value_parser = parse_mesh)]
    pub mesh: Option<Mesh>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Named preset such as 3x3/2 (a bare size means its first application)
    #[arg(long, conflicts_with_all = ["cores", "packets", "total_bits"])]
    pub preset: Option<String>,

    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), required_unless_present = "preset")]
    pub cores: Option<u64>,

    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), required_unless_present = "preset")]
    pub packets: Option<u64>,

    /// Per-packet volume range in bits, MIN:MAX
    #[arg(long, default_value = "16:4096", value_parser = parse_range)]
    pub volume: (u64, u64),

    /// Computation time range in whole nanoseconds, MIN:MAX
    #[arg(long, default_value = "5:100", value_parser = parse_range)]
    pub comp: (u64, u64),

    #[arg(long, default_value_t = 3)]
    pub fanout: usize,

    /// Rescale volumes to add up to exactly this many bits
    #[arg(long)]
    pub total_bits: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(short, long, value_name = "FILE")]
    pub output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchKind {
    Sa,
    Exhaustive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Cwm,
    Cdcm,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Cwm => Model::Cwm,
            ModelArg::Cdcm => Model::Cdcm,
        }
    }
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value = "sa")]
    pub search: SearchKind,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Independent annealing runs
    #[arg(long, default_value_t = SaParams::default().restarts)]
    pub restarts: usize,

    /// Largest number of placements exhaustive search will enumerate
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: u128,

    /// Print search wall-clock times (makes output vary between runs)
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    #[command(flatten)]
    pub target: Target,

    #[arg(long, value_enum, default_value = "cdcm")]
    pub model: ModelArg,

    #[command(flatten)]
    pub search: SearchArgs,

    /// Where to write the mapping
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Report log to append the search result to
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub target: Target,

    #[arg(long, value_name = "FILE")]
    pub mapping: PathBuf,

    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,

    /// Report log to append the metrics to
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Application files; rows are named after the file stems
    #[arg(long = "app", value_name = "FILE", required = true, num_args = 1..)]
    pub apps: Vec<PathBuf>,

    /// Technology profiles; the first also gives the execution-time column
    #[arg(long = "platform", num_args = 1.., default_values = ["t035", "t007"])]
    pub platforms: Vec<String>,

    #[arg(long, value_parser = parse_mesh)]
    pub mesh: Option<Mesh>,

    #[command(flatten)]
    pub search: SearchArgs,

    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Directory for one file per application plus the merged report
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Report log to append the comparison to
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub target: Target,

    #[arg(long, value_name = "FILE")]
    pub mapping: PathBuf,

    #[arg(long, default_value = "text", value_parser = |s: &str| s.parse::<Format>())]
    pub format: Format,

    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

fn parse_mesh(s: &str) -> Result<Mesh, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got '{s}'"))?;
    let w = w.trim().parse().map_err(|_| format!("bad mesh width in '{s}'"))?;
    let h = h.trim().parse().map_err(|_| format!("bad mesh height in '{s}'"))?;
    Mesh::new(w, h).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected MIN:MAX, got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad lower bound in '{s}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad upper bound in '{s}'"))?;
    Ok((a, b))
}

/// Runs a parsed command line, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Outcome {
    let dir = cli.platform_dir.as_deref();
    let text = match cli.command {
        Command::Generate(a) => generate(a)?,
        Command::Map(a) => map(a, dir)?,
        Command::Evaluate(a) => evaluate(a, dir)?,
        Command::Compare(a) => {
            let (table, failed) = compare(a, dir)?;
            out.write_all(table.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
            return match failed {
                0 => Ok(()),
                n => Err(Failure { code: EXIT_INVALID, message: format!("{n} application(s) failed") }),
            };
        }
        Command::Trace(a) => trace(a, dir)?,
    };
    out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn append_report(path: Option<&Path>, r: &Report) -> Outcome {
    match path {
        Some(p) => io::store_report(r, p).map_err(|e| load_failure(p, e)),
        None => Ok(()),
    }
}

fn load_app(path: &Path) -> Outcome<Cdcg> {
    io::load_application(path).map_err(|e| load_failure(path, e))
}

fn load_mapping(path: &Path) -> Outcome<Mapping> {
    io::load_mapping(path).map_err(|e| load_failure(path, e))
}

/// A file path, then `<dir>/<name>.json`, then a built-in profile.
pub fn resolve_platform(spec: &str, mesh: Option<Mesh>, dir: Option<&Path>) -> Outcome<Platform> {
    let mut candidates = vec![PathBuf::from(spec)];
    if let Some(d) = dir {
        candidates.push(d.join(spec));
        candidates.push(d.join(format!("{spec}.json")));
    }
    for path in candidates {
        if path.is_file() {
            let mut p = io::load_platform(&path).map_err(|e| load_failure(&path, e))?;
            if let Some(m) = mesh {
                p.mesh = m;
            }
            return Ok(p);
        }
    }
    match (NocParams::preset(spec), mesh) {
        (Some(params), Some(mesh)) => Ok(Platform { name: Some(spec.to_string()), mesh, params }),
        (Some(_), None) => Err(Failure::usage(format!("built-in platform '{spec}' needs --mesh"))),
        (None, _) => Err(Failure { code: EXIT_IO, message: format!("platform '{spec}' not found") }),
    }
}

fn generate(a: GenerateArgs) -> Outcome<String> {
    let (config, note) = match &a.preset {
        Some(name) => {
            let p = benchgen::preset(name).ok_or_else(|| Failure::usage(format!("unknown preset '{name}'")))?;
            (BenchConfig { seed: a.seed, ..p.config }, format!(" (preset {}, mesh {})", p.name, p.mesh))
        }
        None => (
            BenchConfig {
                n_cores: a.cores.expect("required by clap") as usize,
                n_packets: a.packets.expect("required by clap") as usize,
                volume_range: a.volume,
                comp_range: (Time::from_ns(a.comp.0), Time::from_ns(a.comp.1)),
                max_fanout: a.fanout,
                seed: a.seed,
                total_bits: a.total_bits,
            },
            String::new(),
        ),
    };
    let app = benchgen::generate(&config)?;
    write_file(&a.output, &io::application_to_string(&app))?;
    Ok(format!(
        "{} cores, {} packets, {} bits{note}\n",
        app.cores.len(),
        app.packets.len(),
        app.total_bits()
    ))
}

fn describe(app: &Cdcg, m: &Mapping) -> String {
    m.iter()
        .map(|(c, t)| {
            let name = app.core(c).map_or_else(|| c.to_string(), |core| core.label());
            format!("{name}:{t}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn sa_params(s: &SearchArgs) -> SaParams {
    SaParams { restarts: s.restarts, ..SaParams::with_seed(s.seed) }
}

fn map(a: MapArgs, dir: Option<&Path>) -> Outcome<String> {
    let app = load_app(&a.target.app)?;
    let platform = resolve_platform(&a.target.platform, a.target.mesh, dir)?;
    let model: Model = a.model.into();
    let objective = Objective::new(model, platform.params);
    let result = match a.search.search {
        SearchKind::Sa => simulated_annealing(&objective, &app, &platform.mesh, &sa_params(&a.search))?,
        SearchKind::Exhaustive => exhaustive_search_with_limit(&objective, &app, &platform.mesh, a.search.limit)?,
    };
    if let Some(path) = &a.output {
        write_file(path, &io::mapping_to_string(&result.best_mapping))?;
    }
    let mut s = format!("model {model}, mesh {}\n", platform.mesh);
    if let Some(init) = result.initial_cost {
        s += &format!("initial cost {init}\n");
    }
    s += &format!("best cost {}\n", result.best_cost);
    if let Some(t) = result.best_texec {
        s += &format!("texec {t} ns\n");
    }
    s += &format!("evaluations {}\n", result.evaluations);
    if a.search.timings {
        s += &format!("wall time {:.3} s\n", result.wall_time.as_secs_f64());
    }
    s += &format!("mapping {}\n", describe(&app, &result.best_mapping));
    append_report(a.report.as_deref(), &Report::Search(result))?;
    Ok(s)
}

fn evaluate(a: EvaluateArgs, dir: Option<&Path>) -> Outcome<String> {
    let app = load_app(&a.target.app)?;
    let platform = resolve_platform(&a.target.platform, a.target.mesh, dir)?;
    let mapping = load_mapping(&a.mapping)?;
    let report = simulate(&app, &mapping, &platform.mesh, &platform.params)?;
    let m = Metrics::from_report(&report);
    append_report(a.report.as_deref(), &Report::Evaluation(m.clone()))?;
    Ok(match a.format {
        OutputFormat::Json => io::canonical_json(&m),
        OutputFormat::Text => format!(
            "texec {} ns\nedy_noc {}\nest_noc {}\nenoc {}\nwait {} ns, contended pairs {}, max queue {} bits\n",
            m.texec, m.edy_noc, m.est_noc, m.enoc, m.contention.total_wait, m.contention.contended_pairs, m.contention.max_queue_bits
        ),
    })
}

/// The table and the number of applications that failed.
fn compare(a: CompareArgs, dir: Option<&Path>) -> Outcome<(String, usize)> {
    let platforms: Vec<Platform> =
        a.platforms.iter().map(|p| resolve_platform(p, a.mesh, dir)).collect::<Outcome<_>>()?;
    let mesh = platforms[0].mesh;
    if platforms.iter().any(|p| p.mesh != mesh) {
        return Err(Failure::usage("platforms disagree on the mesh; pass --mesh"));
    }
    let profiles: Vec<Profile> = platforms
        .iter()
        .zip(&a.platforms)
        .map(|(p, spec)| Profile::new(p.name.as_deref().unwrap_or(spec), p.params))
        .collect();
    let mut seen = BTreeSet::new();
    if let Some(dup) = profiles.iter().find(|p| !seen.insert(p.name.clone())) {
        return Err(Failure::usage(format!("profile '{}' given twice", dup.name)));
    }

    let mut apps = Vec::new();
    let mut names = BTreeSet::new();
    for path in &a.apps {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        if !names.insert(name.clone()) {
            return Err(Failure::usage(format!("two applications are named '{name}'")));
        }
        apps.push((name, load_app(path)?, mesh));
    }

    let options = CompareOptions {
        search: match a.search.search {
            SearchKind::Sa => Search::Annealing(sa_params(&a.search)),
            SearchKind::Exhaustive => Search::Exhaustive,
        },
        profiles,
        timings: a.search.timings,
    };
    let report = match a.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Failure::usage(e.to_string()))?
            .install(|| compare::compare_all(&apps, &options)),
        None => compare::compare_all(&apps, &options),
    };

    if let Some(out) = &a.out_dir {
        fs::create_dir_all(out).map_err(|e| Failure::io(out, e))?;
        for row in &report.rows {
            write_file(&out.join(format!("{}.json", row.app)), &io::canonical_json(row))?;
        }
        write_file(&out.join("comparison.json"), &io::canonical_json(&report))?;
    }
    append_report(a.report.as_deref(), &Report::Comparison(report.clone()))?;
    Ok((compare::render_table(&report), report.failures.len()))
}

fn trace(a: TraceArgs, dir: Option<&Path>) -> Outcome<String> {
    let app = load_app(&a.target.app)?;
    let platform = resolve_platform(&a.target.platform, a.target.mesh, dir)?;
    let mapping = load_mapping(&a.mapping)?;
    let report = simulate(&app, &mapping, &platform.mesh, &platform.params)?;
    let text = Trace::build(&app, &report, platform.params.lambda).render(a.format);
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
