//! CFAR-loss bookkeeping for CA and GOCA under each law.

use cfarkit::detector::{Law, Strategy};
use cfarkit::loss::loss_report;

fn main() -> cfarkit::Result<()> {
    println!("{:<6} {:<7} {:>5} {:>6} {:>9} {:>9} {:>6}", "method", "law", "chi", "k", "m_eff", "ratio", "n_log");
    for strategy in [Strategy::Ca, Strategy::Goca] {
        for law in [Law::Linear, Law::Square, Law::Log] {
            let r = loss_report(strategy, law, 1e-6, 56)?;
            println!(
                "{:<6} {:<7} {:>5} {:>6.2} {:>9.3} {:>9.6} {:>6}",
                strategy.name(),
                law.name(),
                r.chi,
                r.k,
                r.m_eff,
                r.ratio,
                r.n_log
            );
        }
    }
    Ok(())
}
