//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a usage or validation error, 2 when a
//! certificate fails, 3 on an input or output error.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};

use crate::adversarial::{
    expander_fractal_level, gnhalf_fractal_level, product_tree_truncation, AdversarialError, LevelSpec,
    ProductTreeSpec,
};
use crate::metric::{load_metric, metric_to_json, InputFormat, MeasuredMetricSpace, MetricError, PointId};
use crate::oracles::{distortion_of_pair, exact_distortion_of_pair, to_rational, OracleError, MAX_COVER_UNIVERSE};
use crate::ramsey::{ramsey_subset, RamseyCertificate, RamseyError, ShiftMode, DISTORTION_SLACK};
use crate::report::canonical_json;
use crate::skeleton::{build_skeleton, verify_cover_subset, CoverMode, PipelineParams, SkeletonError};
use crate::tree::{min_cutset_cost, to_dot, TreeJson};
use crate::ultrametric::{Merge, Ultrametric};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Relative slack of the re-verified cut-set inequality.
const CUTSET_SLACK: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "ultraskel", version, about = "Ultrametric skeletons of finite metric measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a skeleton and write its certificate.
    Skeleton(SkeletonArgs),
    /// Two-weight Ramsey subset with the measure as both weights.
    Ramsey(RamseyArgs),
    /// Re-check a report against its input.
    Verify(VerifyArgs),
    /// Generate an adversarial metric.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Edges,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Json => InputFormat::Json,
            FormatArg::Edges => InputFormat::EdgeList,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Metric file (csv, json or edge list).
    #[arg(long)]
    pub input: PathBuf,
    /// Overrides the format guessed from the extension.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["epsilon", "delta", "raw_d"])))]
pub struct SkeletonArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Exponent 1 - eps at distortion at most 9 / eps.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Distortion 2 + delta, for delta in (0, 1/2).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Raw target distortion D.
    #[arg(long = "raw-D", requires_all = ["raw_k", "raw_tau"])]
    pub raw_d: Option<f64>,
    #[arg(long = "raw-k", requires = "raw_d")]
    pub raw_k: Option<usize>,
    #[arg(long = "raw-tau", requires = "raw_d")]
    pub raw_tau: Option<f64>,
    /// Skip the composition step and keep the lacunary ultrametric.
    #[arg(long)]
    pub simple: bool,
    /// Re-check the distortion in rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Newick dendrogram of the ultrametric.
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,
    /// Graphviz rendering of the final tree.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("shift").required(true).args(["seed", "derandomize"])))]
pub struct RamseyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub epsilon: f64,
    /// Seed of a sampled shift.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scan every shift interval instead of sampling.
    #[arg(long)]
    pub derandomize: bool,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// Distortion of the dendrogram against the report's bound.
    Distortion,
    /// Cut-set inequality on the report's tree.
    Cutset,
    /// Ball-cover inequality, exact for small subsets.
    Cover,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Report written by `skeleton` or `ramsey`.
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "distortion,cutset")]
    pub check: Vec<Check>,
    #[arg(long)]
    pub exact: bool,
    /// Seed of the sampled cover check on large subsets.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `G(n, 1/2)` with distances 1 and 2.
    Gnhalf,
    /// Random 4-regular expander levels.
    Expander,
    /// Levels drawn from `G(n, 1/2)`, scaled to diameter 1.
    Product,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Levels of the truncation (expander and product).
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sidecar path; defaults to `<out>.spec.json`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Certificate(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Certificate(_) => EXIT_CERTIFICATE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Certificate(m) => write!(f, "certificate failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Io(m) => CliError::Io(m),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SkeletonError> for CliError {
    fn from(e: SkeletonError) -> Self {
        match e {
            SkeletonError::Metric(m) => m.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}

usage_from!(RamseyError, AdversarialError, OracleError);

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load(input: &InputArgs) -> Result<MeasuredMetricSpace, CliError> {
    Ok(load_metric(&input.input, input.format.map(Into::into))?)
}

/// Exact check of `distortion(space, u) <= bound`, up to the float slack on
/// the bound itself.
fn exact_within(x: &MeasuredMetricSpace, u: &Ultrametric, bound: f64) -> Result<bool, CliError> {
    let exact = exact_distortion_of_pair(&x.space, u)?;
    info!("exact distortion {exact}");
    Ok(exact <= to_rational(bound * (1.0 + DISTORTION_SLACK)))
}

pub fn cmd_skeleton(args: &SkeletonArgs) -> Result<i32, CliError> {
    let params = match (args.epsilon, args.delta, args.raw_d) {
        (Some(e), _, _) => PipelineParams::from_epsilon(e)?,
        (_, Some(d), _) => PipelineParams::from_delta(d)?,
        (_, _, Some(d)) => PipelineParams::raw(
            d,
            args.raw_k.expect("required by --raw-D"),
            args.raw_tau.expect("required by --raw-D"),
        )?,
        _ => unreachable!("clap requires one mode"),
    }
    .with_simple(args.simple);
    let x = load(&args.input)?;
    let result = build_skeleton(&x, &params)?;
    write_out(args.out.as_deref(), &canonical_json(&result.report()))?;
    if let Some(p) = &args.dendrogram {
        write_out(Some(p), &result.ultrametric.to_newick(|q| x.space.label(q)))?;
    }
    if let Some(p) = &args.dot {
        write_out(Some(p), &to_dot(&result.map, |q| x.space.label(q)))?;
    }
    if !result.ok() {
        return Err(CliError::Certificate(format!("{:?}", result.certificate)));
    }
    if args.exact && !params.simple && !exact_within(&x, &result.ultrametric, params.d)? {
        return Err(CliError::Certificate(format!("exact distortion exceeds D = {}", params.d)));
    }
    Ok(EXIT_OK)
}

/// Output of the `ramsey` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyReport {
    pub epsilon: f64,
    pub shift_mode: ShiftMode,
    pub subset: Vec<PointId>,
    pub dendrogram_merges: Vec<Merge>,
    pub distortion: f64,
    pub certificate: RamseyCertificate,
}

pub fn cmd_ramsey(args: &RamseyArgs) -> Result<i32, CliError> {
    let x = load(&args.input)?;
    let mode = match args.seed {
        Some(seed) if !args.derandomize => ShiftMode::Sampled { seed },
        _ => ShiftMode::Derandomized,
    };
    let out = ramsey_subset(&x.space, &x.mu, &x.mu, args.epsilon, mode)?;
    let report = RamseyReport {
        epsilon: args.epsilon,
        shift_mode: mode,
        subset: out.subset.as_slice().to_vec(),
        dendrogram_merges: out.ultrametric.merges(),
        distortion: out.certificate.distortion,
        certificate: out.certificate.clone(),
    };
    write_out(args.out.as_deref(), &canonical_json(&report))?;
    if let Some(p) = &args.dendrogram {
        write_out(Some(p), &out.ultrametric.to_newick(|q| x.space.label(q)))?;
    }
    if !out.certificate.ok {
        return Err(CliError::Certificate(format!("{:?}", out.certificate)));
    }
    if args.exact && !exact_within(&x, &out.ultrametric, out.certificate.distortion_bound)? {
        return Err(CliError::Certificate("exact distortion exceeds D".into()));
    }
    Ok(EXIT_OK)
}

/// The fields `verify` reads from either report kind.
#[derive(Debug, Deserialize)]
struct ReportView {
    subset: Vec<PointId>,
    dendrogram_merges: Vec<Merge>,
    #[serde(default)]
    tree: Option<TreeJson>,
    #[serde(default)]
    params: Option<PipelineParams>,
    #[serde(default)]
    exponent_s: Option<f64>,
    certificate: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub ok: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub ok: bool,
    /// The report's own verdict, when it has one.
    pub claimed: Option<bool>,
    /// `ok` equals the claimed verdict.
    pub reproduces: bool,
}

fn check_distortion(x: &MeasuredMetricSpace, view: &ReportView, exact: bool) -> Result<CheckOutcome, CliError> {
    let u = Ultrametric::from_merges(view.subset.clone(), &view.dendrogram_merges)
        .map_err(|e| CliError::Usage(format!("dendrogram: {e}")))?;
    let value = distortion_of_pair(&x.space, &u)?;
    let (bound, ok) = match &view.params {
        Some(p) if p.simple => {
            let b = p.log_distortion_bound().exp();
            (b, value.ln() <= p.log_distortion_bound() + DISTORTION_SLACK)
        }
        Some(p) => (p.d, value <= p.d * (1.0 + DISTORTION_SLACK)),
        None => {
            let b = view.certificate["D"]
                .as_f64()
                .ok_or_else(|| CliError::Usage("report has neither params nor certificate.D".into()))?;
            (b, value <= b * (1.0 + DISTORTION_SLACK))
        }
    };
    let ok = if exact && ok { exact_within(x, &u, bound)? } else { ok };
    let detail = if exact { "rational".to_string() } else { "float".to_string() };
    Ok(CheckOutcome { check: Check::Distortion, ok, value, bound, detail })
}

fn check_cutset(x: &MeasuredMetricSpace, view: &ReportView) -> Result<CheckOutcome, CliError> {
    let (Some(tree), Some(s)) = (&view.tree, view.exponent_s) else {
        return Err(CliError::Usage("the cut-set check needs a skeleton report".into()));
    };
    let map = tree.to_map().map_err(|e| CliError::Usage(format!("tree: {e}")))?;
    let valid = map.validate(x.len()).is_ok();
    let t = map.tree();
    let mut leaves: Vec<PointId> = t.leaves().iter().flat_map(|&l| map.cluster(l).iter()).collect();
    leaves.sort_unstable();
    let cost: Vec<f64> =
        (0..map.len()).map(|v| x.measure_of(map.cluster(t.parent(v).unwrap_or(v)).as_slice())).collect();
    let value = min_cutset_cost(t, &cost, s);
    let bound = x.total().powf(s);
    let ok = valid && leaves == view.subset && value >= bound * (1.0 - CUTSET_SLACK);
    let detail = format!("exponent {s}, valid map {valid}");
    Ok(CheckOutcome { check: Check::Cutset, ok, value, bound, detail })
}

fn check_cover(
    x: &MeasuredMetricSpace,
    view: &ReportView,
    seed: u64,
    samples: usize,
) -> Result<CheckOutcome, CliError> {
    let (Some(p), Some(s)) = (&view.params, view.exponent_s) else {
        return Err(CliError::Usage("the cover check needs a skeleton report".into()));
    };
    let mode = if view.subset.len() <= MAX_COVER_UNIVERSE {
        CoverMode::Exact
    } else {
        CoverMode::Sampled { seed, samples }
    };
    let v = verify_cover_subset(&view.subset, p.cover_const_log, x, s, mode)?;
    let detail = format!("{mode:?}, singleton sum {}, trivialized {}", v.singleton_sum, v.trivialized);
    Ok(CheckOutcome { check: Check::Cover, ok: v.ok, value: v.min_cost, bound: v.bound, detail })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.report.display())))?;
    let view: ReportView = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("report: {e}")))?;
    let x = load(&args.input)?;
    if let Some(&p) = view.subset.iter().find(|&&p| p >= x.len()) {
        return Err(CliError::Usage(format!("report names point {p} outside the input")));
    }
    let mut checks = Vec::new();
    for c in &args.check {
        checks.push(match c {
            Check::Distortion => check_distortion(&x, &view, args.exact)?,
            Check::Cutset => check_cutset(&x, &view)?,
            Check::Cover => check_cover(&x, &view, args.seed, args.samples)?,
        });
    }
    let ok = checks.iter().all(|c| c.ok);
    let claimed = view.certificate["ok"].as_bool();
    let report = VerifyReport { checks, ok, claimed, reproduces: claimed.is_none_or(|c| c == ok) };
    write_out(args.out.as_deref(), &canonical_json(&report))?;
    if ok {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Certificate("verification failed".into()))
    }
}

/// Sidecar written next to a generated metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: String,
    pub n: usize,
    pub alpha: Option<f64>,
    pub depth: usize,
    pub seed: u64,
    pub levels: Vec<LevelSpec>,
}

pub fn cmd_gen(args: &GenArgs) -> Result<i32, CliError> {
    let (space, levels, alpha) = match args.family {
        Family::Gnhalf => {
            let s = gnhalf_fractal_level(args.n, args.seed)?;
            let level = LevelSpec { n: args.n, dist: s.as_flat().iter().map(|d| d / 2.0).collect() };
            (s, vec![level], args.alpha)
        }
        Family::Expander => {
            let alpha = args.alpha.unwrap_or(1.0);
            let lvl = expander_fractal_level(alpha, args.n, args.seed)?;
            let spec = ProductTreeSpec::constant(alpha, lvl.spec.levels[0].clone(), args.depth);
            (product_tree_truncation(&spec, args.depth)?.space, spec.levels, Some(alpha))
        }
        Family::Product => {
            let alpha = args.alpha.unwrap_or(1.0);
            let g = gnhalf_fractal_level(args.n, args.seed)?;
            let level = LevelSpec { n: args.n, dist: g.as_flat().iter().map(|d| d / 2.0).collect() };
            let spec = ProductTreeSpec::constant(alpha, level, args.depth);
            (product_tree_truncation(&spec, args.depth)?.space, spec.levels, Some(alpha))
        }
    };
    let family = format!("{:?}", args.family).to_lowercase();
    let sidecar = GenSpec { family, n: args.n, alpha, depth: args.depth, seed: args.seed, levels };
    write_out(args.out.as_deref(), &metric_to_json(&MeasuredMetricSpace::counting(space)))?;
    let spec_path = args.spec.clone().or_else(|| {
        args.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".spec.json");
            PathBuf::from(s)
        })
    });
    if let Some(p) = spec_path {
        write_out(Some(&p), &canonical_json(&sidecar))?;
    }
    Ok(EXIT_OK)
}

pub fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Skeleton(a) => cmd_skeleton(a),
        Command::Ramsey(a) => cmd_ramsey(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("ULTRASKEL_LOG")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}
