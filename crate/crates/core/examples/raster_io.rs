//! Write a scene as F32R, read it back, move between domains and store the
//! detection mask.

use cfarkit::detector::{DetectorConfig, Law, Strategy};
use cfarkit::engine::{load_mask, run_detection, store_mask, EngineChoice};
use cfarkit::raster::{load_raster, store_raster, Domain};
use cfarkit::simulator::{gen_scene, SceneSpec, Target};

fn main() -> cfarkit::Result<()> {
    let dir = std::env::temp_dir().join("cfarkit-raster-io");
    std::fs::create_dir_all(&dir).map_err(|source| cfarkit::Error::Io { path: dir.clone(), source })?;
    let mut spec = SceneSpec::homogeneous(64, 48, 2);
    spec.targets.push(Target { row: 20, col: 30, rows: 2, cols: 2, multiplier: 50.0 });
    let (img, _) = gen_scene(&spec)?;

    let path = dir.join("scene.f32r");
    store_raster(&img.to_magnitude(), &path)?;
    let back = load_raster(&path)?;
    println!("read {}x{} {:?}, {} looks", back.width(), back.height(), back.domain(), back.looks());

    let power = back.convert(Domain::Power)?;
    let map = run_detection(&power, &"1x1/2/2".parse()?, &DetectorConfig::new(Strategy::Ca, Law::Square, 1e-3)?, EngineChoice::Auto)?;
    let mask_path = dir.join("scene.mask");
    store_mask(&map.mask, &mask_path)?;
    let mask = load_mask(&mask_path)?;
    println!("{} detections written to {}", mask.iter().filter(|&&m| m).count(), mask_path.display());
    let db = back.to_db()?;
    println!("peak {:.1} dB", db.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(())
}
