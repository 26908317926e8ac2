//! Command-line front end: facet catalogs, bounds, robustness scans, the
//! F_n family, generalizations and the acceptance suite.
//!
//! [`run`] parses a command line, writes human output to the given writer
//! and returns the process exit code, so the whole surface is testable
//! in-process.

pub mod manifest;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hybrid_bell::cpt::enumerate_facets;
use hybrid_bell::error::Error as CoreError;
use hybrid_bell::family::{
    family_inequality, family_quantum, family_quantum_value, gamma_bound, GAMMA_CAP, QUANTUM_CAP,
};
use hybrid_bell::generalize::{reduce_inequality, ExtensionRule, Generalizer};
use hybrid_bell::inequality::{BoundsRecord, InequalityRecord, MarginalConvention, SymmetricInequality};
use hybrid_bell::models::{CardinalityTuple, HybridModel};
use hybrid_bell::named;
use hybrid_bell::ns::nosignaling_bound;
use hybrid_bell::quantum::{critical_interval, seesaw_max, CriticalInterval, RobustnessOptions, SeesawOptions};
use hybrid_bell::scenario::Scenario;
use hybrid_bell::symmetry::SymmetryGroup;
use hybrid_bell::verify::{self, VerifyOptions};

use manifest::{RunManifest, ScenarioTag};

pub const EXIT_OK: u8 = 0;
/// `verify` ran and at least one criterion failed.
pub const EXIT_FAILED: u8 = 1;
/// Unknown flag, bad flag value or missing argument.
pub const EXIT_USAGE: u8 = 2;
/// Input unreadable or output unwritable.
pub const EXIT_IO: u8 = 3;
/// Input readable but malformed or inconsistent.
pub const EXIT_INPUT: u8 = 4;
/// Requested size exceeds an enumeration cap.
pub const EXIT_CAP: u8 = 5;
/// Numerical or LP failure.
pub const EXIT_COMPUTE: u8 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed input {}: {msg}", path.display())]
    Input { path: PathBuf, msg: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => EXIT_IO,
            CliError::Input { .. } => EXIT_INPUT,
            CliError::Argument(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::CapExceeded(_) => EXIT_CAP,
                CoreError::Io(_) => EXIT_IO,
                CoreError::Parse(_)
                | CoreError::InvalidScenario(_)
                | CoreError::InvalidCardinality(_)
                | CoreError::InvalidRule(_)
                | CoreError::ScenarioMismatch(_)
                | CoreError::DimensionMismatch { .. } => EXIT_INPUT,
                _ => EXIT_COMPUTE,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hybrid-bell", version, about = "Bell inequalities for hybrid local models")]
pub struct Cli {
    /// Worker threads for per-inequality work.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Base seed for every stochastic stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for JSON/text/CSV artifacts; stdout only when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate the symmetric full-body facets of one hybrid model.
    Facets(FacetsArgs),
    /// Classical, no-signaling and seesaw bounds of stored inequalities.
    Bounds(BoundsArgs),
    /// Critical noise interval of stored inequalities on noisy GHZ states.
    Robustness(RobustnessArgs),
    /// Table of the F_n family.
    Family(FamilyArgs),
    /// Generalize an inequality to more settings with a random LP direction.
    Generalize(GeneralizeArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SeesawArgs {
    /// Random restarts per seesaw run.
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl SeesawArgs {
    fn options(&self, seed: u64) -> SeesawOptions {
        SeesawOptions { restarts: self.restarts, max_sweeps: self.max_sweeps, tol: self.tol, seed }
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Grid points of the coarse noise scan.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Violation below this counts as none.
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    /// Target width of the bisected interval.
    #[arg(long, default_value_t = 1e-4)]
    width: f64,
}

impl ScanArgs {
    fn options(&self, seesaw: SeesawOptions) -> RobustnessOptions {
        RobustnessOptions { grid: self.grid, threshold: self.threshold, width: self.width, seesaw, ..RobustnessOptions::default() }
    }
}

#[derive(Debug, Args)]
struct FacetsArgs {
    #[arg(long)]
    n: usize,
    /// Cardinality tuple, e.g. 2,2,1.
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 2)]
    settings: usize,
    /// Also compute classical, no-signaling and seesaw bounds.
    #[arg(long)]
    bounds: bool,
    /// Also compute critical noise intervals.
    #[arg(long)]
    robustness: bool,
    #[command(flatten)]
    scan: ScanArgs,
    #[command(flatten)]
    seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
struct Source {
    /// Inequality JSON: one record, an array, or a `facets` document.
    #[arg(long = "in", conflicts_with = "name")]
    input: Option<PathBuf>,
    /// A built-in inequality (svetlichny, mermin4, f1, F5, ...).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    /// Model for the classical bound; defaults to the record's model, else fully local.
    #[arg(long)]
    model: Option<String>,
    #[command(flatten)]
    seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
struct RobustnessArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    scan: ScanArgs,
    #[command(flatten)]
    seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Party range such as 3..8 or a single n.
    #[arg(long, default_value = "3..8")]
    n: String,
    /// Largest n that also gets a noise scan.
    #[arg(long, default_value_t = 6)]
    robustness_up_to: usize,
    #[command(flatten)]
    scan: ScanArgs,
    #[command(flatten)]
    seesaw: SeesawArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Uniform,
    PartnerFirst,
}

#[derive(Debug, Args)]
struct GeneralizeArgs {
    /// Built-in name or inequality JSON file.
    #[arg(long)]
    base: String,
    /// Extension rule, e.g. "A3=1,B3=1,C3=1" or "A3=A1,B3=B1,C3=C1".
    #[arg(long)]
    rule: String,
    #[arg(long, default_value = "2,1")]
    model: String,
    /// Settings of the target scenario; defaults to one more than the base.
    #[arg(long)]
    settings: Option<usize>,
    /// Number of random directions, seeded from `--seed` upward.
    #[arg(long, default_value_t = 1)]
    directions: u64,
    #[arg(long, value_enum, default_value_t = Convention::Uniform)]
    convention: Convention,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run every criterion.
    #[arg(long, conflicts_with = "criterion")]
    all: bool,
    /// Run only these criteria (repeatable).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
    criterion: Vec<u8>,
    /// Random directions per rule in criterion 6.
    #[arg(long, default_value_t = verify::GENERALIZATION_SEEDS)]
    seeds: u64,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
}

/// What a command produced, before emission.
struct Output {
    stem: String,
    data: Value,
    text: String,
    csv: Option<String>,
    passed: bool,
}

impl Output {
    fn new(stem: impl Into<String>, data: Value, text: String) -> Self {
        Output { stem: stem.into(), data, text, csv: None, passed: true }
    }
}

/// Runs one command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut manifest = RunManifest::new(command, cli.seed, cli.jobs.max(1));
    let result = dispatch(&cli, &mut manifest, out).and_then(|o| emit(&cli, manifest, o, out));
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, manifest: &mut RunManifest, out: &mut dyn Write) -> CliResult<Output> {
    if let Command::Verify(a) = &cli.command {
        return verify_cmd(a, cli, manifest, out);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| CliError::Argument(format!("--jobs: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Facets(a) => facets(a, cli.seed, manifest),
        Command::Bounds(a) => bounds(a, cli.seed, manifest),
        Command::Robustness(a) => robustness(a, cli.seed, manifest),
        Command::Family(a) => family(a, cli.seed, manifest),
        Command::Generalize(a) => generalize(a, cli.seed, manifest),
        Command::Verify(_) => unreachable!("handled above"),
    })
}

fn emit(cli: &Cli, mut manifest: RunManifest, o: Output, out: &mut dyn Write) -> CliResult<bool> {
    let data = serde_json::to_string_pretty(&o.data).expect("serializable");
    manifest.artifact(format!("{}.data", o.stem), data.as_bytes());
    manifest.artifact(format!("{}.txt", o.stem), o.text.as_bytes());
    if let Some(csv) = &o.csv {
        manifest.artifact(format!("{}.csv", o.stem), csv.as_bytes());
    }
    manifest.finished_unix = manifest::now();
    let doc = serde_json::to_string_pretty(&json!({ "manifest": manifest, "data": o.data })).expect("serializable");
    let header = format!("# manifest {}\n", serde_json::to_string(&manifest).expect("serializable"));
    let stdout_err = |e| CliError::Write { path: "<stdout>".into(), source: e };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Write { path: dir.clone(), source: e })?;
            let mut files = vec![(format!("{}.json", o.stem), doc + "\n"), (format!("{}.txt", o.stem), header.clone() + &o.text)];
            if let Some(csv) = &o.csv {
                files.push((format!("{}.csv", o.stem), header + csv));
            }
            for (name, body) in files {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| CliError::Write { path: path.clone(), source: e })?;
                writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
            }
            write!(out, "{}", o.text).map_err(stdout_err)?;
        }
        None => match cli.format {
            Format::Json => writeln!(out, "{doc}").map_err(stdout_err)?,
            Format::Text => write!(out, "{}", o.text).map_err(stdout_err)?,
            Format::Csv => match &o.csv {
                Some(csv) => write!(out, "{csv}").map_err(stdout_err)?,
                None => return Err(CliError::Argument(format!("no CSV form for '{}'", o.stem))),
            },
        },
    }
    Ok(o.passed)
}

fn parse_model(s: &str) -> CliResult<CardinalityTuple> {
    Ok(s.parse::<CardinalityTuple>()?)
}

fn record_tolerances(m: &mut RunManifest, seesaw: &SeesawOptions) {
    m.tolerance("seesaw_tol", seesaw.tol);
    m.tolerance("seesaw_restarts", seesaw.restarts as f64);
    m.tolerance("seesaw_max_sweeps", seesaw.max_sweeps as f64);
}

fn record_scan(m: &mut RunManifest, r: &RobustnessOptions) {
    m.tolerance("robustness_grid", r.grid as f64);
    m.tolerance("robustness_threshold", r.threshold);
    m.tolerance("robustness_width", r.width);
}

/// Seesaw value with a stalled run still counting as a lower bound.
fn quantum_lb(ineq: &SymmetricInequality, opts: &SeesawOptions) -> CliResult<f64> {
    match seesaw_max(ineq, None, opts) {
        Ok(r) => Ok(r.value),
        Err(CoreError::NoConvergence { last, .. }) => Ok(last),
        Err(e) => Err(e.into()),
    }
}

fn interval_text(iv: &CriticalInterval) -> String {
    match iv {
        CriticalInterval::Empty => "empty".into(),
        CriticalInterval::Interval { p0, p1 } => format!("[{p0:.5}, {p1:.5}]"),
    }
}

fn interval_csv(iv: Option<&CriticalInterval>) -> String {
    match iv {
        None => ",,".into(),
        Some(CriticalInterval::Empty) => ",,empty".into(),
        Some(CriticalInterval::Interval { p0, p1 }) => format!("{p0},{p1},interval"),
    }
}

fn opt_csv<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

#[derive(Debug, Serialize)]
struct FacetItem {
    index: usize,
    #[serde(flatten)]
    record: InequalityRecord,
    class_size: usize,
    projected_rank: usize,
    projected_target: usize,
    lift_rank: usize,
    lift_target: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    robustness: Option<CriticalInterval>,
}

fn facets(a: &FacetsArgs, seed: u64, m: &mut RunManifest) -> CliResult<Output> {
    let s = Scenario::new(a.n, a.settings)?;
    let h = parse_model(&a.model)?;
    m.scenario = Some(ScenarioTag { n: a.n, m: a.settings });
    m.model = Some(h.to_string());
    let seesaw = a.seesaw.options(seed);
    let scan = a.scan.options(seesaw);
    if a.bounds {
        record_tolerances(m, &seesaw);
    }
    if a.robustness {
        record_scan(m, &scan);
    }
    let catalog = enumerate_facets(s, &h, &SymmetryGroup::default())?;
    let model = if a.bounds { Some(HybridModel::full_body(s, h.clone())?) } else { None };
    let items: Vec<CliResult<FacetItem>> = catalog
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let ineq = e.ineq();
            let mut record = ineq.to_record();
            record.model = Some(h.to_string());
            if let Some(model) = &model {
                let opts = SeesawOptions { seed: seed.wrapping_add(i as u64), ..seesaw };
                record.bounds = Some(BoundsRecord {
                    classical: Some(model.classical_bound(ineq)?.to_string()),
                    nosignaling: Some(nosignaling_bound(ineq)?.to_string()),
                    quantum_lb: Some(quantum_lb(ineq, &opts)?),
                });
            }
            let robustness = if a.robustness {
                let opts = RobustnessOptions { seesaw: SeesawOptions { seed: seed.wrapping_add(i as u64), ..seesaw }, ..scan };
                Some(critical_interval(ineq, &opts)?.interval)
            } else {
                None
            };
            Ok(FacetItem {
                index: i + 1,
                record,
                class_size: e.class_size,
                projected_rank: e.projected_rank,
                projected_target: e.projected_target,
                lift_rank: e.lift.rank,
                lift_target: e.lift.target,
                robustness,
            })
        })
        .collect();
    let items: Vec<FacetItem> = items.into_iter().collect::<CliResult<_>>()?;

    let mut text = format!(
        "# {} parties, {} settings, model {}: {} inequalities\n# {} vertices, {} projected facets ({} single-term)\n",
        a.n,
        a.settings,
        h,
        items.len(),
        catalog.vertices,
        catalog.raw_facets,
        catalog.trivial_facets
    );
    let mut csv = String::from("index,inequality,class_size,classical,nosignaling,quantum_lb,p0,p1,status\n");
    for it in &items {
        text.push_str(&format!("{:>3}  {}", it.index, it.record.text.as_deref().unwrap_or("")));
        if let Some(b) = &it.record.bounds {
            text.push_str(&format!(
                "   [classical {}, NS {}, quantum >= {:.6}]",
                opt_csv(&b.classical),
                opt_csv(&b.nosignaling),
                b.quantum_lb.unwrap_or(f64::NAN)
            ));
        }
        if let Some(iv) = &it.robustness {
            text.push_str(&format!("   p* {}", interval_text(iv)));
        }
        text.push('\n');
        let b = it.record.bounds.clone().unwrap_or_default();
        csv.push_str(&format!(
            "{},\"{}\",{},{},{},{},{}\n",
            it.index,
            it.record.text.as_deref().unwrap_or(""),
            it.class_size,
            opt_csv(&b.classical),
            opt_csv(&b.nosignaling),
            opt_csv(&b.quantum_lb),
            interval_csv(it.robustness.as_ref())
        ));
    }
    let data = json!({
        "scenario": { "n": a.n, "m": a.settings },
        "model": h.to_string(),
        "vertices": catalog.vertices,
        "raw_facets": catalog.raw_facets,
        "trivial_facets": catalog.trivial_facets,
        "inequalities": items,
    });
    let stem = format!("facets_n{}_{}", a.n, h.sizes().iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-"));
    Ok(Output { csv: Some(csv), ..Output::new(stem, data, text) })
}

/// Loads inequalities from a file (hashing it into the manifest) or by name.
fn load(src: &Source, m: &mut RunManifest) -> CliResult<Vec<InequalityRecord>> {
    match (&src.input, &src.name) {
        (Some(path), _) => {
            let bytes = fs::read(path).map_err(|e| CliError::Read { path: path.clone(), source: e })?;
            m.artifact(path.display().to_string(), &bytes);
            parse_records(path, &bytes)
        }
        (None, Some(name)) => {
            let mut r = named::by_name(name)?.to_record();
            r.model = None;
            Ok(vec![r])
        }
        (None, None) => Err(CliError::Argument("one of --in or --name is required".into())),
    }
}

fn parse_records(path: &Path, bytes: &[u8]) -> CliResult<Vec<InequalityRecord>> {
    let bad = |msg: String| CliError::Input { path: path.to_path_buf(), msg };
    let v: Value = serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
    let list = match v {
        Value::Array(items) => items,
        Value::Object(ref o) if o.contains_key("data") => match &o["data"]["inequalities"] {
            Value::Array(items) => items.clone(),
            _ => return Err(bad("document has no data.inequalities array".into())),
        },
        obj @ Value::Object(_) => vec![obj],
        _ => return Err(bad("expected an inequality record or an array of them".into())),
    };
    let records: Vec<InequalityRecord> = list
        .into_iter()
        .map(|x| serde_json::from_value(x).map_err(|e| bad(e.to_string())))
        .collect::<CliResult<_>>()?;
    if records.is_empty() {
        return Err(bad("no inequalities".into()));
    }
    for r in &records {
        SymmetricInequality::from_record(r).map_err(|e| bad(e.to_string()))?;
    }
    Ok(records)
}

fn bounds(a: &BoundsArgs, seed: u64, m: &mut RunManifest) -> CliResult<Output> {
    let records = load(&a.source, m)?;
    let seesaw = a.seesaw.options(seed);
    record_tolerances(m, &seesaw);
    let results: Vec<CliResult<InequalityRecord>> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let ineq = SymmetricInequality::from_record(r)?;
            let s = *ineq.scenario();
            let h = match a.model.as_deref().or(r.model.as_deref()) {
                Some(t) => parse_model(t)?,
                None => CardinalityTuple::new(vec![1; s.parties()])?,
            };
            let model = HybridModel::full_body(s, h.clone())?;
            let opts = SeesawOptions { seed: seed.wrapping_add(i as u64), ..seesaw };
            let mut out = r.clone();
            out.text = Some(ineq.to_text());
            out.model = Some(h.to_string());
            out.bounds = Some(BoundsRecord {
                classical: Some(model.classical_bound(&ineq)?.to_string()),
                nosignaling: Some(nosignaling_bound(&ineq)?.to_string()),
                quantum_lb: Some(quantum_lb(&ineq, &opts)?),
            });
            Ok(out)
        })
        .collect();
    let results: Vec<InequalityRecord> = results.into_iter().collect::<CliResult<_>>()?;
    let mut text = String::new();
    let mut csv = String::from("index,inequality,model,classical,nosignaling,quantum_lb\n");
    for (i, r) in results.iter().enumerate() {
        let b = r.bounds.clone().unwrap_or_default();
        let model = r.model.clone().unwrap_or_default();
        let ineq = r.text.clone().unwrap_or_default();
        text.push_str(&format!(
            "{:>3}  {ineq}\n     model {model}: classical {}, no-signaling {}, quantum >= {:.9}\n",
            i + 1,
            opt_csv(&b.classical),
            opt_csv(&b.nosignaling),
            b.quantum_lb.unwrap_or(f64::NAN)
        ));
        csv.push_str(&format!(
            "{},\"{ineq}\",\"{model}\",{},{},{}\n",
            i + 1,
            opt_csv(&b.classical),
            opt_csv(&b.nosignaling),
            opt_csv(&b.quantum_lb)
        ));
    }
    Ok(Output { csv: Some(csv), ..Output::new("bounds", json!({ "inequalities": results }), text) })
}

#[derive(Debug, Serialize)]
struct RobustnessItem {
    index: usize,
    inequality: String,
    interval: CriticalInterval,
    ghz_value: f64,
    grid_points: usize,
}

fn robustness(a: &RobustnessArgs, seed: u64, m: &mut RunManifest) -> CliResult<Output> {
    let records = load(&a.source, m)?;
    let scan = a.scan.options(a.seesaw.options(seed));
    record_tolerances(m, &scan.seesaw);
    record_scan(m, &scan);
    let items: Vec<CliResult<RobustnessItem>> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let ineq = SymmetricInequality::from_record(r)?;
            let opts = RobustnessOptions { seesaw: SeesawOptions { seed: seed.wrapping_add(i as u64), ..scan.seesaw }, ..scan };
            let rep = critical_interval(&ineq, &opts)?;
            Ok(RobustnessItem {
                index: i + 1,
                inequality: ineq.to_text(),
                interval: rep.interval,
                ghz_value: rep.ghz_value,
                grid_points: rep.grid_points,
            })
        })
        .collect();
    let items: Vec<RobustnessItem> = items.into_iter().collect::<CliResult<_>>()?;
    let mut text = String::new();
    let mut csv = String::from("index,inequality,p0,p1,status\n");
    for it in &items {
        text.push_str(&format!("{:>3}  {}  {}\n", it.index, interval_text(&it.interval), it.inequality));
        csv.push_str(&format!("{},\"{}\",{}\n", it.index, it.inequality, interval_csv(Some(&it.interval))));
    }
    Ok(Output { csv: Some(csv), ..Output::new("robustness", json!({ "inequalities": items }), text) })
}

fn parse_range(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Argument(format!("expected N or A..B, got '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Serialize)]
struct FamilyRow {
    n: usize,
    classical_bound: i64,
    /// Two-cell splits `(k, m)`, `k >= m >= 2`, whose bound equals `classical_bound`.
    verified_splits: Vec<(usize, usize)>,
    failed_splits: Vec<(usize, usize)>,
    /// Bound of the `(n-1, 1)` model, which exceeds `classical_bound`.
    bound_n1_1: i128,
    quantum_value: Option<f64>,
    quantum_analytic: f64,
    noise_threshold: Option<CriticalInterval>,
}

fn family(a: &FamilyArgs, seed: u64, m: &mut RunManifest) -> CliResult<Output> {
    let (lo, hi) = parse_range(&a.n)?;
    if lo < 3 {
        return Err(CliError::Argument("F_n needs n >= 3".into()));
    }
    if hi > GAMMA_CAP {
        return Err(CoreError::CapExceeded(format!("gamma search limited to {GAMMA_CAP} parties")).into());
    }
    let scan = a.scan.options(a.seesaw.options(seed));
    record_scan(m, &scan);
    let rows: Vec<CliResult<FamilyRow>> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let fi = family_inequality(n)?;
            let (mut ok, mut bad) = (Vec::new(), Vec::new());
            for k in (n.div_ceil(2)..=n - 2).rev() {
                let split = (k, n - k);
                if gamma_bound(k, n - k)? == fi.bound as i128 {
                    ok.push(split);
                } else {
                    bad.push(split);
                }
            }
            let quantum_value = if n <= QUANTUM_CAP { Some(family_quantum(n)?.0) } else { None };
            let noise_threshold = if n <= a.robustness_up_to {
                let opts = RobustnessOptions { seesaw: SeesawOptions { seed: seed.wrapping_add(n as u64), ..scan.seesaw }, ..scan };
                Some(critical_interval(&fi.to_symmetric()?, &opts)?.interval)
            } else {
                None
            };
            Ok(FamilyRow {
                n,
                classical_bound: fi.bound,
                verified_splits: ok,
                failed_splits: bad,
                bound_n1_1: gamma_bound(n - 1, 1)?,
                quantum_value,
                quantum_analytic: family_quantum_value(n),
                noise_threshold,
            })
        })
        .collect();
    let rows: Vec<FamilyRow> = rows.into_iter().collect::<CliResult<_>>()?;
    let mut text = format!(
        "{:>3} {:>10} {:>22} {:>12} {:>16} {:>18}\n",
        "n", "bound", "(k,m) splits verified", "(n-1,1)", "quantum", "noise p*"
    );
    let mut csv = String::from("n,classical_bound,verified_splits,failed_splits,bound_n1_1,quantum_value,quantum_analytic,p0,p1,status\n");
    for r in &rows {
        let splits = if r.verified_splits.is_empty() && r.failed_splits.is_empty() {
            "none".to_string()
        } else {
            format!("{}/{}", r.verified_splits.len(), r.verified_splits.len() + r.failed_splits.len())
        };
        let q = r.quantum_value.map_or("-".into(), |v| format!("{v:.8}"));
        let p = r.noise_threshold.as_ref().map_or("-".into(), interval_text);
        text.push_str(&format!("{:>3} {:>10} {:>22} {:>12} {:>16} {:>18}\n", r.n, r.classical_bound, splits, r.bound_n1_1, q, p));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.classical_bound,
            r.verified_splits.len(),
            r.failed_splits.len(),
            r.bound_n1_1,
            opt_csv(&r.quantum_value),
            r.quantum_analytic,
            interval_csv(r.noise_threshold.as_ref())
        ));
    }
    let passed = rows.iter().all(|r| r.failed_splits.is_empty());
    Ok(Output { csv: Some(csv), passed, ..Output::new("family", json!({ "rows": rows }), text) })
}

#[derive(Debug, Serialize)]
struct GeneralizeItem {
    seed: u64,
    #[serde(flatten)]
    record: InequalityRecord,
    canonical: String,
    objective: String,
    reduces_to: String,
    reduces_to_base: bool,
}

fn generalize(a: &GeneralizeArgs, seed: u64, m: &mut RunManifest) -> CliResult<Output> {
    let base = if Path::new(&a.base).is_file() {
        let src = Source { input: Some(PathBuf::from(&a.base)), name: None };
        let recs = load(&src, m)?;
        SymmetricInequality::from_record(&recs[0])?
    } else {
        named::by_name(&a.base)?
    };
    let s1 = *base.scenario();
    let s2 = Scenario::new(s1.parties(), a.settings.unwrap_or(s1.settings() + 1))?;
    let rule = ExtensionRule::parse(s1, s2, &a.rule)?;
    let h = parse_model(&a.model)?;
    let conv = match a.convention {
        Convention::Uniform => MarginalConvention::UniformAverage,
        Convention::PartnerFirst => MarginalConvention::PartnerFirst,
    };
    m.scenario = Some(ScenarioTag { n: s2.parties(), m: s2.settings() });
    m.model = Some(h.to_string());
    m.seeds = (seed..seed.saturating_add(a.directions)).collect();
    let g = Generalizer::new(base.clone(), rule.clone(), h.clone(), conv)?;
    let group = SymmetryGroup::default();
    let base_canon = group.canonicalize(&base);
    let mut pool = Vec::new();
    let mut items = Vec::new();
    for sd in seed..seed.saturating_add(a.directions) {
        let r = g.solve_with_pool(&g.random_direction(sd), &mut pool)?;
        let reduced = reduce_inequality(&r.inequality, &rule)?;
        let mut record = r.inequality.to_record();
        record.model = Some(h.to_string());
        record.bounds = Some(BoundsRecord { classical: Some(r.inequality.constant().to_string()), ..Default::default() });
        items.push(GeneralizeItem {
            seed: sd,
            record,
            canonical: group.canonicalize(&r.inequality).to_text(),
            objective: r.objective.to_string(),
            reduces_to: reduced.to_text(),
            reduces_to_base: group.canonicalize(&reduced) == base_canon,
        });
    }
    let mut text = format!("# base {} | rule {rule} | model {h} on {} parties, {} settings\n", base.to_text(), s2.parties(), s2.settings());
    let mut csv = String::from("seed,inequality,canonical,reduces_to_base\n");
    for it in &items {
        text.push_str(&format!(
            "seed {}: {}\n    canonical {}\n    reduces to {}{}\n",
            it.seed,
            it.record.text.as_deref().unwrap_or(""),
            it.canonical,
            it.reduces_to,
            if it.reduces_to_base { " (base, up to relabeling)" } else { "" }
        ));
        csv.push_str(&format!("{},\"{}\",\"{}\",{}\n", it.seed, it.record.text.as_deref().unwrap_or(""), it.canonical, it.reduces_to_base));
    }
    let data = json!({ "base": base.to_record(), "rule": rule.to_string(), "results": items });
    Ok(Output { csv: Some(csv), ..Output::new("generalize", data, text) })
}

fn verify_cmd(a: &VerifyArgs, cli: &Cli, m: &mut RunManifest, out: &mut dyn Write) -> CliResult<Output> {
    if !a.all && a.criterion.is_empty() {
        return Err(CliError::Argument("verify needs --all or --criterion N".into()));
    }
    let mut opts = VerifyOptions { seeds: a.seeds, ..VerifyOptions::default() };
    opts.seesaw.restarts = a.restarts;
    opts.seesaw.seed = cli.seed;
    opts.robustness.seesaw.seed = cli.seed;
    m.seeds = (0..a.seeds).collect();
    record_tolerances(m, &opts.seesaw);
    record_scan(m, &opts.robustness);
    for (k, v) in [
        ("svetlichny_seesaw", verify::SVETLICHNY_SEESAW_TOL),
        ("threshold", verify::THRESHOLD_TOL),
        ("family_quantum", verify::FAMILY_QUANTUM_TOL),
        ("family_noise", verify::FAMILY_NOISE_TOL),
        ("state_purity", verify::STATE_PURITY_TOL),
        ("state_bell", verify::STATE_BELL_TOL),
        ("seesaw_bound_slack", verify::SEESAW_BOUND_SLACK),
    ] {
        m.tolerance(k, v);
    }
    let stream = cli.out.is_none() && cli.format == Format::Text;
    let reports = verify::run(&a.criterion, &opts, |r| {
        if stream {
            let _ = write!(out, "{r}");
            let _ = out.flush();
        }
    })?;
    let passed = reports.iter().all(|r| r.passed());
    let mut text = String::new();
    if !stream {
        for r in &reports {
            text.push_str(&r.to_string());
        }
    }
    text.push_str(&format!("{}/{} criteria passed\n", reports.iter().filter(|r| r.passed()).count(), reports.len()));
    let mut csv = String::from("criterion,title,passed,checks_passed,checks,seconds\n");
    for r in &reports {
        csv.push_str(&format!(
            "{},\"{}\",{},{},{},{:.2}\n",
            r.id,
            r.title,
            r.passed(),
            r.checks.iter().filter(|c| c.passed).count(),
            r.checks.len(),
            r.seconds
        ));
    }
    Ok(Output { csv: Some(csv), passed, ..Output::new("verify", json!({ "criteria": reports }), text) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("hybrid-bell").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, text) = call(&["facets", "--n", "4", "--model", "2,2", "--bogus"]);
        assert_eq!(code, EXIT_USAGE, "{text}");
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, text) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("facets"));
    }

    #[test]
    fn unreadable_file() {
        let (code, text) = call(&["bounds", "--in", "/nonexistent/ineq.json"]);
        assert_eq!(code, EXIT_IO, "{text}");
    }

    #[test]
    fn malformed_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        fs::write(&p, "{\"n\": 3}").unwrap();
        let (code, text) = call(&["bounds", "--in", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT, "{text}");
    }

    #[test]
    fn bad_model_is_input_error() {
        assert_eq!(call(&["facets", "--n", "4", "--model", "1,3"]).0, EXIT_INPUT);
        assert_eq!(call(&["facets", "--n", "4", "--model", "2,1"]).0, EXIT_INPUT);
    }

    #[test]
    fn cap_violation() {
        let (code, text) = call(&["family", "--n", "30"]);
        assert_eq!(code, EXIT_CAP, "{text}");
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("3..8").unwrap(), (3, 8));
        assert_eq!(parse_range("3..=8").unwrap(), (3, 8));
        assert_eq!(parse_range("5").unwrap(), (5, 5));
        assert!(parse_range("8..3").is_err());
    }

    #[test]
    fn four_party_local_catalog() {
        let (code, text) = call(&["facets", "--n", "4", "--model", "1,1,1,1"]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.contains(": 5 inequalities"), "{text}");
    }

    #[test]
    fn five_party_catalog_json() {
        let (code, text) = call(&["--format", "json", "facets", "--n", "5", "--model", "4,1"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["data"]["inequalities"].as_array().unwrap().len(), 21);
        assert_eq!(v["manifest"]["model"], "(4,1)");
        assert!(v["manifest"]["artifacts"].as_object().unwrap().contains_key("facets_n5_4-1.data"));
    }

    #[test]
    fn svetlichny_bounds() {
        let (code, text) = call(&["--format", "json", "bounds", "--name", "svetlichny", "--model", "2,1"]);
        assert_eq!(code, EXIT_OK, "{text}");
        let v: Value = serde_json::from_str(&text).unwrap();
        let b = &v["data"]["inequalities"][0]["bounds"];
        assert_eq!(b["classical"], "4");
        assert_eq!(b["nosignaling"], "8");
        assert!((b["quantum_lb"].as_f64().unwrap() - 4.0 * 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn out_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(call(&["--out", d, "facets", "--n", "4", "--model", "2,2"]).0, EXIT_OK);
        for ext in ["json", "txt", "csv"] {
            assert!(dir.path().join(format!("facets_n4_2-2.{ext}")).is_file());
        }
        // the catalog document feeds straight into bounds
        let p = dir.path().join("facets_n4_2-2.json");
        let (code, text) = call(&["--format", "csv", "bounds", "--in", p.to_str().unwrap(), "--restarts", "2"]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert_eq!(text.lines().count(), 1 + 7);
    }

    #[test]
    fn never_violated_prints_empty() {
        let cat = enumerate_facets(Scenario::new(4, 2).unwrap(), &"3,1".parse().unwrap(), &SymmetryGroup::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cat.json");
        let recs: Vec<InequalityRecord> = cat.entries.iter().map(|e| e.ineq().to_record()).collect();
        fs::write(&p, serde_json::to_string(&recs).unwrap()).unwrap();
        let (code, text) = call(&["robustness", "--in", p.to_str().unwrap(), "--restarts", "3"]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert_eq!(text.lines().filter(|l| l.contains("empty")).count(), 1, "{text}");
    }

    #[test]
    fn family_table() {
        let (code, text) = call(&["--format", "csv", "family", "--n", "3..5", "--robustness-up-to", "0"]);
        assert_eq!(code, EXIT_OK, "{text}");
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[2].starts_with("5,40,1,0,"), "{}", rows[2]);
    }

    #[test]
    fn generalize_trivial_rule() {
        let (code, text) = call(&["generalize", "--base", "svetlichny", "--rule", "A3=1,B3=1,C3=1", "--seed", "3"]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.contains("reduces to"), "{text}");
    }

    #[test]
    fn verify_needs_selection() {
        assert_eq!(call(&["verify"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "--criterion", "9"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_single_criterion() {
        let (code, text) = call(&["verify", "--criterion", "5"]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.starts_with("PASS C5"), "{text}");
    }
}
