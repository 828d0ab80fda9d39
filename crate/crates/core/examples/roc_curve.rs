//! Sweep α over a scene with targets and print the ROC operating points.

use cfarkit::detector::{DetectorConfig, Law, Strategy};
use cfarkit::gofbench::{roc_points, Rows};
use cfarkit::simulator::{SceneSpec, Target};

fn main() -> cfarkit::Result<()> {
    let mut scene = SceneSpec::homogeneous(256, 256, 3);
    scene.targets = (0..6)
        .map(|i| Target { row: 30 + 35 * i, col: 40 + 30 * i, rows: 2, cols: 2, multiplier: 4.0 + 4.0 * i as f64 })
        .collect();
    let cfg = DetectorConfig::new(Strategy::Ca, Law::Square, 1e-3)?;
    let alphas = [1.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0];
    let report = roc_points(&scene, &"1x1/2/2".parse()?, &cfg, &alphas, 2, &Default::default())?;
    if let Rows::Roc(points) = &report.rows {
        for p in points {
            println!("alpha {:>5.1}  pfa {:.2e}  pd {:.3}", p.alpha, p.pfa, p.pd);
        }
    }
    Ok(())
}
