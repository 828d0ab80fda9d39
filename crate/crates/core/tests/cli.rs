//! End-to-end runs of the `cfarkit` binary.

use std::path::Path;
use std::process::{Command, Output};

use cfarkit::engine::load_mask;
use cfarkit::raster::load_raster;

fn cfarkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfarkit"))
        .args(args)
        .env_remove("CFARKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(out: &str, key: &str) -> String {
    out.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key}= in {out:?}"))
        .to_string()
}

fn simulate(dir: &Path) -> String {
    let scene = dir.join("scene.f32r");
    let o = cfarkit(&[
        "simulate",
        "--width",
        "128",
        "--height",
        "96",
        "--target",
        "40,50,3,3,40",
        "--seed",
        "7",
        "--out",
        scene.to_str().unwrap(),
        "--out-truth",
        dir.join("truth.mask").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    scene.to_str().unwrap().to_string()
}

#[test]
fn detect_finds_the_injected_target() {
    let dir = tempfile::tempdir().unwrap();
    let scene = simulate(dir.path());
    let img = load_raster(&scene).unwrap();
    assert_eq!((img.height(), img.width()), (96, 128));
    let mask = dir.path().join("det.mask");
    let rois = dir.path().join("rois.csv");
    let o = cfarkit(&[
        "detect",
        "--input",
        &scene,
        "--pfa",
        "1e-4",
        "--out-mask",
        mask.to_str().unwrap(),
        "--out-rois",
        rois.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(field(&out, "rois").parse::<usize>().unwrap() >= 1);
    let m = load_mask(&mask).unwrap();
    assert!(m[[41, 51]]);
    assert!(std::fs::read_to_string(&rois).unwrap().lines().count() >= 2);
}

#[test]
fn invalid_pfa_is_a_usage_error() {
    let o = cfarkit(&["alpha", "--pfa", "2.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pfa"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(cfarkit(&["alpha", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(cfarkit(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn log_law_on_power_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let scene = simulate(dir.path());
    let o = cfarkit(&["detect", "--input", &scene, "--law", "log", "--pfa", "1e-3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = cfarkit(&["detect", "--input", &scene, "--law", "log", "--pfa", "1e-3", "--auto-convert"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn log_and_square_laws_agree_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let scene = simulate(dir.path());
    let sq = stdout(&cfarkit(&["detect", "--input", &scene, "--pfa", "1e-3"]));
    let lg = stdout(&cfarkit(&["detect", "--input", &scene, "--pfa", "1e-3", "--law", "log", "--auto-convert"]));
    assert_eq!(field(&sq, "detections"), field(&lg, "detections"));
}

#[test]
fn alpha_prints_the_closed_form() {
    let o = cfarkit(&["alpha", "--model", "exp", "--n", "56", "--pfa", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let a: f64 = stdout(&o).trim().parse().unwrap();
    assert!((a - 7.3516).abs() <= 1e-3);
}

#[test]
fn monte_carlo_alpha_needs_a_seed() {
    let o = cfarkit(&["alpha", "--method", "soca", "--pfa", "1e-2", "--put", "1x1", "--guard", "1", "--boundary", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let args = [
        "alpha", "--method", "soca", "--pfa", "1e-2", "--put", "1x1", "--guard", "1", "--boundary", "1", "--seed", "3",
    ];
    let a = stdout(&cfarkit(&args));
    let b = stdout(&cfarkit(&args));
    assert_eq!(a, b);
    assert!(a.trim().parse::<f64>().unwrap() > 1.0);
}

#[test]
fn loss_prints_the_bookkeeping() {
    let o = cfarkit(&["loss", "--method", "ca", "--law", "log", "--pfa", "1e-6", "--m", "56"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "chi"), "6");
    assert_eq!(field(&out, "m_eff"), "34.333");
    assert_eq!(field(&out, "n_log"), "92");
}

#[test]
fn fit_ranks_the_generating_family_first() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("flat.f32r");
    let o = cfarkit(&["simulate", "--width", "100", "--height", "100", "--seed", "9", "--out", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = cfarkit(&["fit", "--input", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = stdout(&o).lines().find(|l| l.starts_with('1')).unwrap().to_string();
    assert!(first.contains("exp"), "{first}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("alpha.cfg");
    std::fs::write(&cfg, "# closed-form CA\nmodel = exp\nn = 56\npfa = 1e-2\n").unwrap();
    let from_file: f64 = stdout(&cfarkit(&["alpha", "--config", cfg.to_str().unwrap()])).trim().parse().unwrap();
    let overridden: f64 = stdout(&cfarkit(&["alpha", "--config", cfg.to_str().unwrap(), "--pfa", "1e-3"]))
        .trim()
        .parse()
        .unwrap();
    assert!(from_file < overridden);
    assert!((overridden - 7.3516).abs() <= 1e-3);

    std::fs::write(&cfg, "pfa = 1e-3\nbogus = 1\n").unwrap();
    assert_eq!(cfarkit(&["alpha", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let scene = simulate(dir.path());
    let run = |threads: &str| {
        let mask = dir.path().join(format!("m{threads}.mask"));
        let o = Command::new(env!("CARGO_BIN_EXE_cfarkit"))
            .args(["detect", "--input", &scene, "--pfa", "1e-3", "--method", "goca", "--seed", "1"])
            .args(["--out-mask", mask.to_str().unwrap()])
            .env("CFARKIT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(mask).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn bench_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = cfarkit(&[
        "bench",
        "calibration",
        "--width",
        "128",
        "--height",
        "128",
        "--trials",
        "8",
        "--pfas",
        "1e-2",
        "--seed",
        "5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("overall: PASS"), "{summary}");
}
