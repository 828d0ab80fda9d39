//! Measure achieved false-alarm rates on homogeneous clutter for several
//! detectors and check each against the binomial 3σ band.

use cfarkit::detector::{Law, Strategy};
use cfarkit::gofbench::{calibration_sweep, CalibrationPlan, Rows};
use cfarkit::simulator::SceneSpec;

fn main() -> cfarkit::Result<()> {
    let plan = CalibrationPlan {
        stencils: vec!["1x1/2/2".parse()?, "3x3/2/3".parse()?],
        strategies: vec![Strategy::Ca, Strategy::Goca, Strategy::Os { q: 0.75 }],
        pfas: vec![1e-2, 1e-3],
        law: Law::Square,
        scene: SceneSpec::homogeneous(256, 256, 100),
        trials: 8,
        engine: Default::default(),
    };
    let report = calibration_sweep(&plan)?;
    if let Rows::Calibration(rows) = &report.rows {
        for r in rows {
            println!(
                "{:<10} {:<7} pfa {:<6} alpha {:>7.4} achieved {:.3e} ({:+.2} sigma)",
                r.stencil.to_string(),
                r.strategy.to_string(),
                r.requested_pfa,
                r.alpha,
                r.achieved_pfa,
                (r.achieved_pfa - r.requested_pfa) / r.sigma
            );
        }
    }
    println!("{}", report.summary());
    Ok(())
}
