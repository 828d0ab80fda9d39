//! Calibration and ROC experiments on simulated scenes.
//!
//! Reports are plain CSV tables plus a short `summary.txt`. Row order
//! follows the plan (stencils, then strategies, then false-alarm rates),
//! never completion order, and each row echoes the seed and pixel counts
//! it was computed from.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::detector::{DetectorConfig, Law, Strategy};
use crate::engine::{run_detection_with, EngineOptions};
use crate::simulator::{gen_scene, measure_rates, Background, SceneSpec};
use crate::stencil::StencilSpec;
use crate::{Error, Result};

/// Achieved-vs-requested false-alarm sweep over homogeneous scenes.
#[derive(Debug, Clone)]
pub struct CalibrationPlan {
    pub stencils: Vec<StencilSpec>,
    pub strategies: Vec<Strategy>,
    pub pfas: Vec<f64>,
    pub law: Law,
    /// Scene template; trial `t` uses seed `scene.seed + t`.
    pub scene: SceneSpec,
    pub trials: usize,
    pub engine: EngineOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub stencil: StencilSpec,
    pub strategy: Strategy,
    pub requested_pfa: f64,
    pub alpha: f64,
    pub achieved_pfa: f64,
    /// Binomial standard error at the requested rate.
    pub sigma: f64,
    pub false_alarms: usize,
    pub pixels: usize,
    pub seed: u64,
    pub trials: usize,
    pub runtime_s: f64,
    /// Set when the cell failed; the numbers are then meaningless.
    pub error: Option<String>,
}

impl CalibrationRow {
    /// Achieved rate within three standard errors of the requested one.
    pub fn within_3_sigma(&self) -> bool {
        self.error.is_none() && (self.achieved_pfa - self.requested_pfa).abs() <= 3.0 * self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocPoint {
    pub alpha: f64,
    pub pfa: f64,
    pub pd: f64,
    pub false_alarms: usize,
    pub clutter_pixels: usize,
    pub detected: usize,
    pub target_pixels: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Calibration(Vec<CalibrationRow>),
    Roc(Vec<RocPoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    /// Everything needed to recompute the report.
    pub config: Vec<(String, String)>,
    pub rows: Rows,
}

pub const CALIBRATION_CSV_HEADER: &str =
    "stencil,strategy,requested_pfa,alpha,achieved_pfa,sigma,false_alarms,pixels,seed,trials,runtime_s,status";
pub const ROC_CSV_HEADER: &str = "alpha,pfa,pd,false_alarms,clutter_pixels,detected,target_pixels,seed";

fn stencil_label(s: &StencilSpec) -> String {
    format!("{}x{}/{}/{}", s.put_rows(), s.put_cols(), s.guard_width(), s.boundary_width())
}

fn scene_echo(scene: &SceneSpec, out: &mut Vec<(String, String)>) {
    let mut push = |k: &str, v: String| out.push((k.to_string(), v));
    push("width", scene.width.to_string());
    push("height", scene.height.to_string());
    push("looks", scene.looks.to_string());
    match scene.background {
        Background::Homogeneous { c } => {
            push("background", "homogeneous".into());
            push("c", c.to_string());
        }
        Background::Heterogeneous { shape, rate } => {
            push("background", "heterogeneous".into());
            push("shape", shape.to_string());
            push("rate", rate.to_string());
        }
        Background::ExtremelyHeterogeneous { shape, gamma } => {
            push("background", "extreme".into());
            push("shape", shape.to_string());
            push("gamma", gamma.to_string());
        }
    }
    for t in &scene.targets {
        push("target", format!("{},{},{},{},{}", t.row, t.col, t.rows, t.cols, t.multiplier));
    }
    push("seed", scene.seed.to_string());
}

impl ExperimentReport {
    pub fn csv_header(&self) -> &'static str {
        match self.rows {
            Rows::Calibration(_) => CALIBRATION_CSV_HEADER,
            Rows::Roc(_) => ROC_CSV_HEADER,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        match &self.rows {
            Rows::Calibration(rows) => {
                for r in rows {
                    let status = match &r.error {
                        Some(e) => format!("failed: {}", e.replace(',', ";")),
                        None if r.within_3_sigma() => "pass".into(),
                        None => "fail".into(),
                    };
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{},{:.3},{}",
                        stencil_label(&r.stencil),
                        r.strategy,
                        r.requested_pfa,
                        r.alpha,
                        r.achieved_pfa,
                        r.sigma,
                        r.false_alarms,
                        r.pixels,
                        r.seed,
                        r.trials,
                        r.runtime_s,
                        status
                    )?;
                }
            }
            Rows::Roc(points) => {
                for p in points {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        p.alpha, p.pfa, p.pd, p.false_alarms, p.clutter_pixels, p.detected, p.target_pixels, p.seed
                    )?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    /// `true` when every calibration cell is within 3σ and every ROC curve
    /// is monotone.
    pub fn passed(&self) -> bool {
        match &self.rows {
            Rows::Calibration(rows) => rows.iter().all(CalibrationRow::within_3_sigma),
            Rows::Roc(points) => roc_is_monotone(points),
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.id);
        for (k, v) in &self.config {
            let _ = writeln!(s, "  {k} = {v}");
        }
        match &self.rows {
            Rows::Calibration(rows) => {
                for r in rows {
                    let verdict = match &r.error {
                        Some(e) => format!("FAILED ({e})"),
                        None if r.within_3_sigma() => "PASS".into(),
                        None => "FAIL".into(),
                    };
                    let _ = writeln!(
                        s,
                        "{verdict}: {} {} pfa {} -> {:.3e} ± {:.1e} ({} / {} pixels)",
                        stencil_label(&r.stencil),
                        r.strategy,
                        r.requested_pfa,
                        r.achieved_pfa,
                        r.sigma,
                        r.false_alarms,
                        r.pixels
                    );
                }
            }
            Rows::Roc(points) => {
                let verdict = if roc_is_monotone(points) { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{verdict}: {} ROC points, monotone in alpha", points.len());
            }
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    /// Writes `<id>.csv` and `summary.txt` into `dir`, creating it if
    /// needed, and returns the paths written.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let csv = dir.join(format!("{}.csv", self.id));
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        fs::write(&csv, buf).map_err(io(&csv))?;
        let summary = dir.join("summary.txt");
        fs::write(&summary, self.summary()).map_err(io(&summary))?;
        Ok(vec![csv, summary])
    }
}

fn roc_is_monotone(points: &[RocPoint]) -> bool {
    let mut sorted: Vec<&RocPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    sorted.windows(2).all(|w| w[1].pfa <= w[0].pfa && w[1].pd <= w[0].pd)
}

/// Runs every (stencil, strategy, pfa) cell over `trials` scenes. Failed
/// cells are reported, not propagated.
pub fn calibration_sweep(plan: &CalibrationPlan) -> Result<ExperimentReport> {
    plan.scene.validate()?;
    if !matches!(plan.scene.background, Background::Homogeneous { .. }) || !plan.scene.targets.is_empty() {
        return Err(Error::InvalidParameter(
            "calibration needs a homogeneous scene without targets".into(),
        ));
    }
    struct Cell {
        prepared: std::result::Result<(DetectorConfig, f64), String>,
        stencil: StencilSpec,
        false_alarms: usize,
        pixels: usize,
        seconds: f64,
        error: Option<String>,
    }
    let mut cells = Vec::new();
    for stencil in &plan.stencils {
        for &strategy in &plan.strategies {
            for &pfa in &plan.pfas {
                let prepared = DetectorConfig::new(strategy, plan.law, pfa)
                    .and_then(|c| {
                        let a = c.solve_alpha(stencil)?;
                        Ok((c.with_alpha(a)?, a))
                    })
                    .map_err(|e| e.to_string());
                let error = prepared.as_ref().err().cloned();
                cells.push(Cell {
                    prepared,
                    stencil: *stencil,
                    false_alarms: 0,
                    pixels: 0,
                    seconds: 0.0,
                    error,
                });
            }
        }
    }
    for t in 0..plan.trials {
        let mut scene = plan.scene.clone();
        scene.seed = plan.scene.seed.wrapping_add(t as u64);
        let (image, truth) = gen_scene(&scene)?;
        let image = image.convert(plan.law.domain())?;
        for cell in cells.iter_mut().filter(|c| c.error.is_none()) {
            let Ok((cfg, _)) = &cell.prepared else {
                continue;
            };
            let start = Instant::now();
            let outcome = run_detection_with(&image, &cell.stencil, cfg, &plan.engine)
                .and_then(|d| measure_rates(&d.mask, &truth, 0, Some(&d.valid_region)));
            cell.seconds += start.elapsed().as_secs_f64();
            match outcome {
                Ok(r) => {
                    cell.false_alarms += r.false_alarms;
                    cell.pixels += r.clutter_pixels;
                }
                Err(e) => cell.error = Some(e.to_string()),
            }
        }
    }
    let mut rows = Vec::new();
    let mut cells = cells.into_iter();
    for stencil in &plan.stencils {
        for &strategy in &plan.strategies {
            for &pfa in &plan.pfas {
                let c = cells.next().expect("one cell per plan entry");
                let achieved = if c.pixels == 0 { 0.0 } else { c.false_alarms as f64 / c.pixels as f64 };
                rows.push(CalibrationRow {
                    stencil: *stencil,
                    strategy,
                    requested_pfa: pfa,
                    alpha: c.prepared.as_ref().map_or(f64::NAN, |p| p.1),
                    achieved_pfa: achieved,
                    sigma: (pfa * (1.0 - pfa) / c.pixels.max(1) as f64).sqrt(),
                    false_alarms: c.false_alarms,
                    pixels: c.pixels,
                    seed: plan.scene.seed,
                    trials: plan.trials,
                    runtime_s: c.seconds,
                    error: c.error,
                });
            }
        }
    }
    let mut config = vec![
        ("law".to_string(), plan.law.name().to_string()),
        ("trials".to_string(), plan.trials.to_string()),
    ];
    scene_echo(&plan.scene, &mut config);
    Ok(ExperimentReport {
        id: "calibration".into(),
        config,
        rows: Rows::Calibration(rows),
    })
}

/// PFA and PD on one scene for each α in `alphas`. The statistic map is
/// computed once; each α only re-thresholds it. PFA is counted over valid
/// pixels farther than `guard_dilation` from any target.
pub fn roc_points(
    scene: &SceneSpec,
    stencil: &StencilSpec,
    config: &DetectorConfig,
    alphas: &[f64],
    guard_dilation: usize,
    engine: &EngineOptions,
) -> Result<ExperimentReport> {
    if scene.targets.is_empty() {
        return Err(Error::InvalidParameter("ROC scene needs at least one target".into()));
    }
    let (image, truth) = gen_scene(scene)?;
    let image = image.convert(config.law.domain())?;
    // Any α gives the same statistic; skip the solve.
    let cfg = config.clone().with_alpha(1.0)?;
    let detection = run_detection_with(&image, stencil, &cfg, engine)?;
    let points = alphas
        .iter()
        .map(|&alpha| {
            let mask = detection.statistic.mapv(|s| s > alpha);
            let r = measure_rates(&mask, &truth, guard_dilation, Some(&detection.valid_region))?;
            Ok(RocPoint {
                alpha,
                pfa: r.pfa,
                pd: r.pd.unwrap_or(0.0),
                false_alarms: r.false_alarms,
                clutter_pixels: r.clutter_pixels,
                detected: r.detected,
                target_pixels: r.target_pixels,
                seed: scene.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut echo = vec![
        ("stencil".to_string(), stencil_label(stencil)),
        ("strategy".to_string(), config.strategy.to_string()),
        ("law".to_string(), config.law.name().to_string()),
        ("guard_dilation".to_string(), guard_dilation.to_string()),
    ];
    scene_echo(scene, &mut echo);
    Ok(ExperimentReport {
        id: "roc".into(),
        config: echo,
        rows: Rows::Roc(points),
    })
}
