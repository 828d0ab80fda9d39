//! CFAR as a quadratic discriminant: compare QDF decisions with the
//! two-parameter rule as the background spread and prior vary.

use cfarkit::detector::{cfar_alpha_for, decide_two_param, qdf_background_discriminant, qdf_decide, qdf_threshold_for};

fn main() -> cfarkit::Result<()> {
    let alpha = 3.0;
    println!("{:>5} {:>6} {:>5} {:>9} {:>9} {:>6} {:>6}", "x", "sigma", "P_B", "z", "score", "cfar", "qdf");
    for (x, sigma, prior) in [(4.0, 1.0, 1.0), (4.0, 1.0, 0.5), (4.0, 0.5, 1.0), (4.0, 2.0, 1.0), (2.5, 0.5, 0.9)] {
        let z = decide_two_param(x, 0.0, sigma, alpha, 1)?;
        let score = qdf_background_discriminant(x, 0.0, sigma, prior)?;
        let a_qdf = qdf_threshold_for(alpha, prior);
        let q = qdf_decide(score, a_qdf);
        println!(
            "{x:>5} {sigma:>6} {prior:>5} {:>9.4} {score:>9.4} {:>6} {:>6}",
            z.statistic,
            z.label.is_target(),
            q.label.is_target()
        );
        assert!((cfar_alpha_for(a_qdf, prior) - alpha).abs() < 1e-12);
    }
    Ok(())
}
