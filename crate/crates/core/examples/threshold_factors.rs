//! Threshold scaling factors: the CA closed form against ring size, and
//! Monte Carlo calibration where no closed form exists.

use cfarkit::detector::{DetectorConfig, Law, Strategy};
use cfarkit::models::{alpha_ca_exponential, alpha_numeric, ClutterModel};
use cfarkit::stencil::StencilSpec;

fn main() -> cfarkit::Result<()> {
    println!("CA, exponential clutter");
    println!("{:>6} {:>10} {:>10} {:>10}", "N", "1e-2", "1e-3", "1e-6");
    for n in [8, 16, 32, 56, 128, 512] {
        let a: Vec<String> = [1e-2, 1e-3, 1e-6]
            .iter()
            .map(|&p| alpha_ca_exponential(n, p).map(|a| format!("{a:10.4}")))
            .collect::<cfarkit::Result<_>>()?;
        println!("{n:>6} {}", a.join(" "));
    }
    // The known-background limit: the exponential quantile, -ln(Pfa).
    let limit = alpha_numeric(&ClutterModel::exponential(1.0)?, 1e-3)?;
    println!("N -> inf at 1e-3: {limit:.4}");

    let stencil: StencilSpec = "1x1/2/2".parse()?;
    for strategy in [Strategy::Ca, Strategy::Soca, Strategy::Goca, Strategy::Os { q: 0.75 }] {
        let mut cfg = DetectorConfig::new(strategy, Law::Square, 1e-3)?;
        cfg.calibration_seed = 7;
        let how = if cfg.exact_alpha(&stencil)?.is_some() { "closed form" } else { "monte carlo" };
        println!("{strategy:<8} alpha {:.4} ({how})", cfg.solve_alpha(&stencil)?);
    }
    Ok(())
}
