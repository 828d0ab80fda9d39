//! The `cfarkit` command line.
//!
//! Every subcommand accepts `--config FILE` with `key = value` lines whose
//! keys are the long flag names; values come from built-in defaults, then
//! the file, then flags. Exit codes: 0 success, 2 usage error, 3 data
//! error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::config::KeyValues;
use crate::detector::{alpha_os_exponential, os_rank, DetectorConfig, Law, LogEstimator, Parameterization, Strategy};
use crate::engine::{run_detection_with, store_mask, write_roi_csv, EngineChoice, EngineOptions, Padding, RoiFilter};
use crate::gofbench::{calibration_sweep, roc_points, CalibrationPlan};
use crate::loss::loss_report;
use crate::models::{alpha_ca_exponential_block, alpha_numeric, parse_candidates, select_model, ClutterModel, Family, GofStatistic, ModelSpec};
use crate::raster::{load_raster, store_raster, write_map, Domain};
use crate::rng::{substream, Purpose};
use crate::simulator::{gen_scene, SceneSpec, SCENE_KEYS};
use crate::stencil::{parse_block, StencilSpec};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cfarkit", version, about = "Sliding-window CFAR detection for SAR rasters")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "CFARKIT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a CFAR detector over an F32R raster.
    Detect(DetectArgs),
    /// Generate a ground-truthed clutter scene.
    Simulate(SimulateArgs),
    /// Print the threshold scaling factor α.
    Alpha(AlphaArgs),
    /// Print CFAR-loss quantities.
    Loss(LossArgs),
    /// Fit and rank clutter models on a raster's pixels.
    Fit(FitArgs),
    /// Run a calibration or ROC experiment and write its report.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct StencilArgs {
    /// PUT block size, RxC [default: 1x1].
    #[arg(long)]
    put: Option<String>,
    /// Guard ring width [default: 2].
    #[arg(long)]
    guard: Option<usize>,
    /// Boundary ring width [default: 2].
    #[arg(long)]
    boundary: Option<usize>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input F32R raster.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    stencil: StencilArgs,
    /// ca, soca, goca, os or os:Q [default: ca].
    #[arg(long)]
    method: Option<String>,
    /// OS rank fraction (overrides the one in --method).
    #[arg(long)]
    q: Option<f64>,
    /// linear, square or log [default: square].
    #[arg(long)]
    law: Option<String>,
    /// 1 or 2 parameters [default: 1].
    #[arg(long)]
    params: Option<String>,
    /// Requested false-alarm probability.
    #[arg(long, conflicts_with = "alpha")]
    pfa: Option<f64>,
    /// Threshold scaling factor, bypassing the solve.
    #[arg(long)]
    alpha: Option<f64>,
    /// Power-domain background model for solving α, e.g. exp or
    /// weibull:shape=2; free parameters are fitted to the image [default: exp].
    #[arg(long)]
    model: Option<String>,
    /// log-of-mean or mean-of-log [default: log-of-mean].
    #[arg(long)]
    log_estimator: Option<String>,
    /// spatial, fft or auto [default: auto].
    #[arg(long)]
    engine: Option<String>,
    /// none or reflect [default: none].
    #[arg(long)]
    padding: Option<String>,
    /// Convert the input to the domain the law needs.
    #[arg(long)]
    auto_convert: bool,
    /// Seed for Monte Carlo α calibration (required when it is needed).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials for α calibration.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out_mask: Option<PathBuf>,
    #[arg(long)]
    out_rois: Option<PathBuf>,
    #[arg(long)]
    out_statistic: Option<PathBuf>,
    #[arg(long)]
    out_threshold: Option<PathBuf>,
    /// Smallest ROI kept, in pixels.
    #[arg(long)]
    min_size: Option<usize>,
    /// Largest ROI kept, in pixels.
    #[arg(long)]
    max_size: Option<usize>,
    /// ROIs whose centroids are closer than this are merged.
    #[arg(long)]
    min_separation: Option<f64>,
}

const DETECT_KEYS: &[&str] = &[
    "input", "put", "guard", "boundary", "method", "q", "law", "params", "pfa", "alpha", "model", "log-estimator",
    "engine", "padding", "auto-convert", "seed", "trials", "out-mask", "out-rois", "out-statistic", "out-threshold",
    "min-size", "max-size", "min-separation",
];

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Number of looks [default: 1].
    #[arg(long)]
    looks: Option<u32>,
    /// homogeneous, heterogeneous or extreme [default: homogeneous].
    #[arg(long)]
    background: Option<String>,
    /// Mean power of a homogeneous background [default: 1].
    #[arg(long)]
    c: Option<f64>,
    /// Backscatter shape (heterogeneous, extreme).
    #[arg(long)]
    shape: Option<f64>,
    /// Backscatter rate (heterogeneous).
    #[arg(long)]
    rate: Option<f64>,
    /// Backscatter scale (extreme).
    #[arg(long)]
    gamma: Option<f64>,
    /// row,col,rows,cols,multiplier; repeatable.
    #[arg(long)]
    target: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output F32R raster.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output truth MASK.
    #[arg(long)]
    out_truth: Option<PathBuf>,
    /// pow, mag or logpow [default: pow].
    #[arg(long)]
    domain: Option<String>,
}

#[derive(Debug, Args)]
struct AlphaArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Background model [default: exp].
    #[arg(long)]
    model: Option<String>,
    /// Boundary pixel count.
    #[arg(long)]
    n: Option<usize>,
    /// PUT pixel count [default: 1].
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    pfa: Option<f64>,
    /// ca, soca, goca, os or os:Q [default: ca].
    #[arg(long)]
    method: Option<String>,
    /// linear, square or log [default: square].
    #[arg(long)]
    law: Option<String>,
    /// 1 or 2 parameters [default: 1].
    #[arg(long)]
    params: Option<String>,
    #[command(flatten)]
    stencil: StencilArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
}

const ALPHA_KEYS: &[&str] = &[
    "model", "n", "m", "pfa", "method", "law", "params", "put", "guard", "boundary", "seed", "trials",
];

#[derive(Debug, Args)]
struct LossArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// ca or goca [default: ca].
    #[arg(long)]
    method: Option<String>,
    /// linear, square or log [default: square].
    #[arg(long)]
    law: Option<String>,
    #[arg(long)]
    pfa: Option<f64>,
    /// Number of averaged reference pixels.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated families [default: exp,weibull:shape=2,lognormal].
    #[arg(long)]
    candidates: Option<String>,
    /// cvm or ad [default: cvm].
    #[arg(long)]
    statistic: Option<String>,
    /// Fit in this domain (pow, mag, logpow) instead of the file's.
    #[arg(long)]
    domain: Option<String>,
    /// Fit a random subset of this many pixels (needs --seed).
    #[arg(long)]
    max_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// calibration or roc.
    experiment: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the CSV table and summary.txt.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scene width [default: 512].
    #[arg(long)]
    width: Option<usize>,
    /// Scene height [default: 512].
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    looks: Option<u32>,
    #[arg(long)]
    background: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    shape: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// row,col,rows,cols,multiplier; repeatable (roc).
    #[arg(long)]
    target: Vec<String>,
    /// Scenes per calibration cell [default: 16].
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated requested rates [default: 1e-2,1e-3].
    #[arg(long)]
    pfas: Option<String>,
    /// Comma-separated methods [default: ca].
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated RxC/guard/boundary stencils [default: 1x1/2/2].
    #[arg(long)]
    stencils: Option<String>,
    /// [default: square]
    #[arg(long)]
    law: Option<String>,
    /// [default: auto]
    #[arg(long)]
    engine: Option<String>,
    /// Comma-separated α values (roc) [default: 0,1,2,4,8,16,32,64].
    #[arg(long)]
    alphas: Option<String>,
    /// Clutter pixels this close to a target are not counted (roc) [default: 2].
    #[arg(long)]
    guard_dilation: Option<usize>,
}

const BENCH_SCENE_KEYS: &[&str] = &["width", "height", "looks", "background", "c", "shape", "rate", "gamma", "target"];
const BENCH_KEYS: &[&str] = &[
    "experiment", "out-dir", "seed", "width", "height", "looks", "background", "c", "shape", "rate", "gamma", "target",
    "trials", "pfas", "methods", "stencils", "law", "engine", "alphas", "guard-dilation",
];

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPfa(_)
            | Error::InvalidParameter(_)
            | Error::InvalidStencil(_)
            | Error::NotTabulated(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(usage(format!("cannot build thread pool: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            EXIT_DATA
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Detect(a) => cmd_detect(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Alpha(a) => cmd_alpha(a),
        Command::Loss(a) => cmd_loss(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Config-file values under command-line flags.
struct Layered {
    file: KeyValues,
}

impl Layered {
    fn load(path: Option<&Path>, known: &[&str]) -> CliResult<Self> {
        let file = match path {
            Some(p) => KeyValues::load(p).map_err(|e| match e {
                Error::Io { .. } => CliError::Data(e.to_string()),
                e => usage(format!("{}: {e}", p.display())),
            })?,
            None => KeyValues::default(),
        };
        file.check_known(known)?;
        Ok(Layered { file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.parse(key).map_err(|e| usage(e.to_string())),
        }
    }

    fn switch(&self, flag: bool, key: &str) -> CliResult<bool> {
        Ok(flag || self.get::<bool>(None, key)?.unwrap_or(false))
    }
}

fn parsed<T: FromStr<Err = Error>>(v: Option<String>, default: &str) -> CliResult<T> {
    Ok(v.as_deref().unwrap_or(default).parse()?)
}

fn parse_domain(s: &str) -> CliResult<Domain> {
    Ok(match s.trim().to_ascii_lowercase().as_str() {
        "pow" | "power" => Domain::Power,
        "mag" | "magnitude" => Domain::Magnitude,
        "logpow" | "log" => Domain::LogPower,
        other => return Err(usage(format!("unknown domain '{other}'"))),
    })
}

fn list<T: FromStr<Err = Error>>(s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(CliError::from))
        .collect()
}

fn numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| usage(format!("bad {what} value '{p}'"))))
        .collect()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Stencil from flags/config, or `None` when none of its keys is set and
/// `optional` is true.
fn stencil_from(l: &Layered, a: StencilArgs, optional: bool) -> CliResult<Option<StencilSpec>> {
    let put = l.get(a.put, "put")?;
    let guard = l.get(a.guard, "guard")?;
    let boundary = l.get(a.boundary, "boundary")?;
    if optional && put.is_none() && guard.is_none() && boundary.is_none() {
        return Ok(None);
    }
    let (r, c) = parse_block(put.as_deref().unwrap_or("1x1"))?;
    Ok(Some(StencilSpec::new(r, c, guard.unwrap_or(2), boundary.unwrap_or(2))?))
}

fn strategy_from(method: Option<String>, q: Option<f64>) -> CliResult<Strategy> {
    let s: Strategy = parsed(method, "ca")?;
    match (s, q) {
        (_, None) => Ok(s),
        (Strategy::Os { .. }, Some(q)) => Ok(Strategy::Os { q }),
        (_, Some(_)) => Err(usage("--q applies to the os method only")),
    }
}

/// Requested rate or explicit α; flags take precedence over the file as a
/// pair, so a flag never combines with the other key from the file.
fn pfa_or_alpha(l: &Layered, pfa: Option<f64>, alpha: Option<f64>) -> CliResult<(Option<f64>, Option<f64>)> {
    if pfa.is_some() || alpha.is_some() {
        return Ok((pfa, alpha));
    }
    let (p, a) = (l.get(None, "pfa")?, l.get(None, "alpha")?);
    if p.is_some() && a.is_some() {
        return Err(usage("config sets both pfa and alpha"));
    }
    if p.is_none() && a.is_none() {
        return Err(usage("one of --pfa or --alpha is required"));
    }
    Ok((p, a))
}

fn require_seed(seed: Option<u64>, why: &str) -> CliResult<u64> {
    seed.ok_or_else(|| usage(format!("{why} is random; pass --seed")))
}

fn cmd_detect(a: DetectArgs) -> CliResult<()> {
    let l = Layered::load(a.config.as_deref(), DETECT_KEYS)?;
    let input: PathBuf = l.get(a.input, "input")?.ok_or_else(|| usage("--input is required"))?;
    let stencil = stencil_from(&l, a.stencil, false)?.expect("stencil is not optional here");
    let strategy = strategy_from(l.get(a.method, "method")?, l.get(a.q, "q")?)?;
    let law: Law = parsed(l.get(a.law, "law")?, "square")?;
    let params: Parameterization = parsed(l.get(a.params, "params")?, "1")?;
    let (pfa, alpha) = pfa_or_alpha(&l, a.pfa, a.alpha)?;
    let model: ModelSpec = parsed(l.get(a.model, "model")?, "exp")?;
    let estimator: LogEstimator = parsed(l.get(a.log_estimator, "log-estimator")?, "log-of-mean")?;
    let engine: EngineChoice = parsed(l.get(a.engine, "engine")?, "auto")?;
    let padding = match l.get(a.padding, "padding")?.as_deref().unwrap_or("none") {
        "none" => Padding::None,
        "reflect" => Padding::Reflect,
        other => return Err(usage(format!("unknown padding '{other}'"))),
    };
    let auto_convert = l.switch(a.auto_convert, "auto-convert")?;
    let seed = l.get(a.seed, "seed")?;
    let trials = l.get(a.trials, "trials")?;
    let out_mask: Option<PathBuf> = l.get(a.out_mask, "out-mask")?;
    let out_rois: Option<PathBuf> = l.get(a.out_rois, "out-rois")?;
    let out_statistic: Option<PathBuf> = l.get(a.out_statistic, "out-statistic")?;
    let out_threshold: Option<PathBuf> = l.get(a.out_threshold, "out-threshold")?;
    let defaults = RoiFilter::default();
    let rois = RoiFilter {
        min_size: l.get(a.min_size, "min-size")?.unwrap_or(defaults.min_size),
        max_size: l.get(a.max_size, "max-size")?.unwrap_or(defaults.max_size),
        min_separation: l.get(a.min_separation, "min-separation")?.unwrap_or(defaults.min_separation),
    };

    // With an explicit α the rate is never consulted; any valid value works.
    let mut cfg = DetectorConfig::new(strategy, law, pfa.unwrap_or(0.5))?;
    cfg.parameterization = params;
    cfg.log_estimator = estimator;
    cfg.calibration_trials = trials;
    if let Some(a) = alpha {
        cfg = cfg.with_alpha(a)?;
    }
    cfg.validate()?;

    let mut image = load_raster(&input)?;
    if image.domain() != law.domain() && auto_convert {
        image = image.convert(law.domain())?;
    }
    if alpha.is_none() {
        let background = match model.family() {
            None => model.resolve(None)?,
            Some(_) => {
                let power = image.to_power();
                let samples = power.real().expect("power images are real");
                model.resolve(Some(samples.as_slice().expect("standard layout")))?
            }
        };
        cfg = cfg.with_background(background);
    }
    if cfg.exact_alpha(&stencil)?.is_none() {
        cfg.calibration_seed = require_seed(seed, "Monte Carlo calibration of alpha")?;
    }

    let opts = EngineOptions {
        choice: engine,
        padding,
        rois,
        ..EngineOptions::default()
    };
    let det = run_detection_with(&image, &stencil, &cfg, &opts)?;
    if let Some(p) = &out_mask {
        store_mask(&det.mask, p)?;
    }
    if let Some(p) = &out_rois {
        write_roi_csv(&det.rois, create(p)?)?;
    }
    if let Some(p) = &out_statistic {
        write_map(&det.statistic, create(p)?)?;
    }
    if let Some(p) = &out_threshold {
        write_map(&det.threshold, create(p)?)?;
    }
    let d = det.diagnostics;
    println!(
        "alpha={} detections={} rois={} valid={} engine={}",
        d.alpha,
        det.detections(),
        det.rois.len(),
        det.valid_region.count(),
        if d.engine == EngineChoice::Fft { "fft" } else { "spatial" }
    );
    if d.clamped_variance > 0 || d.degenerate > 0 {
        eprintln!(
            "warning: {} variances clamped to zero, {} pixels with degenerate background",
            d.clamped_variance, d.degenerate
        );
    }
    Ok(())
}

/// Scene keys from `file` with flag values laid over them.
fn scene_keys(
    file: &KeyValues,
    known: &[&str],
    flags: &[(&str, Option<String>)],
    targets: Vec<String>,
    seed: u64,
) -> KeyValues {
    let mut kv = KeyValues::default();
    for k in known {
        let from_file: Vec<String> = file.all(k).into_iter().map(str::to_string).collect();
        kv.set(k, from_file);
    }
    for (k, v) in flags {
        if let Some(v) = v {
            kv.set(k, [v.clone()]);
        }
    }
    if !targets.is_empty() {
        kv.set("target", targets);
    }
    kv.set("seed", [seed.to_string()]);
    kv
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let mut known = SCENE_KEYS.to_vec();
    known.extend(["out", "out-truth", "domain"]);
    let l = Layered::load(a.config.as_deref(), &known)?;
    let seed = require_seed(l.get(a.seed, "seed")?, "scene generation")?;
    let out: PathBuf = l.get(a.out, "out")?.ok_or_else(|| usage("--out is required"))?;
    let out_truth: Option<PathBuf> = l.get(a.out_truth, "out-truth")?;
    let domain = parse_domain(l.get(a.domain, "domain")?.as_deref().unwrap_or("pow"))?;
    let s = |v: Option<f64>| v.map(|x| x.to_string());
    let flags = [
        ("width", a.width.map(|v| v.to_string())),
        ("height", a.height.map(|v| v.to_string())),
        ("looks", a.looks.map(|v| v.to_string())),
        ("background", a.background),
        ("c", s(a.c)),
        ("shape", s(a.shape)),
        ("rate", s(a.rate)),
        ("gamma", s(a.gamma)),
    ];
    let kv = scene_keys(&l.file, SCENE_KEYS, &flags, a.target, seed);
    let spec = SceneSpec::from_config(&kv)?;
    let (image, truth) = gen_scene(&spec)?;
    store_raster(&image.convert(domain)?, &out)?;
    if let Some(p) = &out_truth {
        store_mask(&truth, p)?;
    }
    println!(
        "wrote {} ({}x{}, {}), {} target pixels",
        out.display(),
        spec.width,
        spec.height,
        domain,
        truth.iter().filter(|t| **t).count()
    );
    Ok(())
}

fn cmd_alpha(a: AlphaArgs) -> CliResult<()> {
    let l = Layered::load(a.config.as_deref(), ALPHA_KEYS)?;
    let pfa: f64 = l.get(a.pfa, "pfa")?.ok_or_else(|| usage("--pfa is required"))?;
    let model: ModelSpec = parsed(l.get(a.model, "model")?, "exp")?;
    // Mean-normalised statistics do not depend on the exponential mean.
    let model = match model.family() {
        Some(f) if f.family == Family::Exponential => ClutterModel::exponential(1.0)?,
        _ => model.resolve(None)?,
    };
    let method = l.get(a.method, "method")?;
    let strategy = strategy_from(method.clone(), None)?;
    let law: Law = parsed(l.get(a.law, "law")?, "square")?;
    let params: Parameterization = parsed(l.get(a.params, "params")?, "1")?;
    let n: Option<usize> = l.get(a.n, "n")?;
    let m: usize = l.get(a.m, "m")?.unwrap_or(1);
    let seed = l.get(a.seed, "seed")?;
    let trials = l.get(a.trials, "trials")?;
    let stencil = stencil_from(&l, a.stencil, true)?;

    let alpha = match (stencil, n) {
        (Some(_), Some(_)) => return Err(usage("give either --n or a stencil, not both")),
        (Some(st), None) => {
            let mut cfg = DetectorConfig::new(strategy, law, pfa)?.with_background(model);
            cfg.parameterization = params;
            cfg.calibration_trials = trials;
            cfg.validate()?;
            if cfg.exact_alpha(&st)?.is_none() {
                cfg.calibration_seed = require_seed(seed, "Monte Carlo calibration of alpha")?;
            }
            cfg.solve_alpha(&st)?
        }
        (None, Some(n)) => {
            let exponential = matches!(model, ClutterModel::Exponential { .. });
            let square = match strategy {
                _ if !exponential || params == Parameterization::Two => None,
                Strategy::Ca if law != Law::Linear => Some(alpha_ca_exponential_block(m, n, pfa)?),
                Strategy::Os { q } if m == 1 => Some(alpha_os_exponential(n, os_rank(n, q), pfa)?),
                _ => None,
            };
            match square {
                Some(a) => match law {
                    Law::Square => a,
                    Law::Linear => a.sqrt(),
                    Law::Log => a.ln(),
                },
                None => {
                    return Err(usage(
                        "no closed form for this configuration; give --put/--guard/--boundary to calibrate on a stencil",
                    ))
                }
            }
        }
        // Fixed threshold for a known clutter distribution.
        (None, None) => {
            if method.is_some() {
                return Err(usage("--method needs --n or a stencil"));
            }
            alpha_numeric(&model, pfa)?
        }
    };
    println!("{alpha:.4}");
    Ok(())
}

fn trim(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cmd_loss(a: LossArgs) -> CliResult<()> {
    let l = Layered::load(a.config.as_deref(), &["method", "law", "pfa", "m"])?;
    let strategy = strategy_from(l.get(a.method, "method")?, None)?;
    let law: Law = parsed(l.get(a.law, "law")?, "square")?;
    let pfa: f64 = l.get(a.pfa, "pfa")?.ok_or_else(|| usage("--pfa is required"))?;
    let m: usize = l.get(a.m, "m")?.ok_or_else(|| usage("--m is required"))?;
    let r = loss_report(strategy, law, pfa, m)?;
    println!("chi={}", trim(r.chi, 3));
    println!("k={}", trim(r.k, 3));
    println!("m_eff={}", trim(r.m_eff, 3));
    println!("ratio={}", trim(r.ratio, 6));
    println!("n_log={}", r.n_log);
    Ok(())
}

fn cmd_fit(a: FitArgs) -> CliResult<()> {
    let l = Layered::load(a.config.as_deref(), &["input", "candidates", "statistic", "domain", "max-samples", "seed"])?;
    let input: PathBuf = l.get(a.input, "input")?.ok_or_else(|| usage("--input is required"))?;
    let candidates = parse_candidates(
        l.get(a.candidates, "candidates")?
            .as_deref()
            .unwrap_or("exp,weibull:shape=2,lognormal"),
    )?;
    let statistic = match l.get(a.statistic, "statistic")?.as_deref().unwrap_or("cvm") {
        "cvm" => GofStatistic::Cvm,
        "ad" => GofStatistic::Ad,
        other => return Err(usage(format!("unknown statistic '{other}'"))),
    };
    let domain = l.get(a.domain, "domain")?.map(|d| parse_domain(&d)).transpose()?;
    let max_samples: Option<usize> = l.get(a.max_samples, "max-samples")?;
    let seed = l.get(a.seed, "seed")?;

    let mut image = load_raster(&input)?;
    if let Some(d) = domain {
        image = image.convert(d)?;
    }
    let grid = image
        .real()
        .ok_or_else(|| usage("complex rasters need --domain"))?;
    let mut samples: Vec<f64> = grid.iter().copied().collect();
    if let Some(k) = max_samples.filter(|k| *k < samples.len()) {
        let mut rng = substream(require_seed(seed, "subsampling")?, Purpose::Experiment, 0);
        samples = rand::seq::index::sample(&mut rng, samples.len(), k)
            .into_iter()
            .map(|i| samples[i])
            .collect();
    }
    let sel = select_model(&samples, &candidates, statistic)?;
    for (i, r) in sel.ranked.iter().enumerate() {
        println!("{}\t{}\t{:.6e}\t{}", i + 1, r.spec, r.score, r.model);
    }
    for (spec, why) in &sel.skipped {
        println!("-\t{spec}\tskipped\t{why}");
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult<()> {
    let l = Layered::load(a.config.as_deref(), BENCH_KEYS)?;
    let experiment = l
        .get(a.experiment, "experiment")?
        .ok_or_else(|| usage("experiment (calibration or roc) is required"))?;
    let out_dir: PathBuf = l.get(a.out_dir, "out-dir")?.ok_or_else(|| usage("--out-dir is required"))?;
    let seed = require_seed(l.get(a.seed, "seed")?, "scene generation")?;
    let s = |v: Option<f64>| v.map(|x| x.to_string());
    let flags = [
        ("width", a.width.map(|v| v.to_string())),
        ("height", a.height.map(|v| v.to_string())),
        ("looks", a.looks.map(|v| v.to_string())),
        ("background", a.background),
        ("c", s(a.c)),
        ("shape", s(a.shape)),
        ("rate", s(a.rate)),
        ("gamma", s(a.gamma)),
    ];
    let mut kv = scene_keys(&l.file, BENCH_SCENE_KEYS, &flags, a.target, seed);
    for dim in ["width", "height"] {
        if kv.all(dim).is_empty() {
            kv.set(dim, ["512"]);
        }
    }
    let scene = SceneSpec::from_config(&kv)?;
    let law: Law = parsed(l.get(a.law, "law")?, "square")?;
    let engine = EngineOptions::from(parsed::<EngineChoice>(l.get(a.engine, "engine")?, "auto")?);
    let strategies: Vec<Strategy> = list(l.get(a.methods, "methods")?.as_deref().unwrap_or("ca"))?;
    let stencils: Vec<StencilSpec> = list(l.get(a.stencils, "stencils")?.as_deref().unwrap_or("1x1/2/2"))?;

    let report = match experiment.as_str() {
        "calibration" => {
            let pfas = numbers(l.get(a.pfas, "pfas")?.as_deref().unwrap_or("1e-2,1e-3"), "pfa")?;
            for p in &pfas {
                crate::error::check_pfa(*p)?;
            }
            calibration_sweep(&CalibrationPlan {
                stencils,
                strategies,
                pfas,
                law,
                scene,
                trials: l.get(a.trials, "trials")?.unwrap_or(16),
                engine,
            })?
        }
        "roc" => {
            let (Some(stencil), Some(strategy)) = (stencils.first(), strategies.first()) else {
                return Err(usage("roc needs one stencil and one method"));
            };
            let alphas = numbers(
                l.get(a.alphas, "alphas")?.as_deref().unwrap_or("0,1,2,4,8,16,32,64"),
                "alpha",
            )?;
            let cfg = DetectorConfig::new(*strategy, law, 0.5)?;
            roc_points(&scene, stencil, &cfg, &alphas, l.get(a.guard_dilation, "guard-dilation")?.unwrap_or(2), &engine)?
        }
        other => return Err(usage(format!("unknown experiment '{other}'"))),
    };
    let files = report.write_to_dir(&out_dir)?;
    print!("{}", report.summary());
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
