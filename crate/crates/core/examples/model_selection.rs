//! Fit candidate clutter families to simulated pixels and rank them by
//! Cramér–von Mises and Anderson–Darling distance.

use cfarkit::models::{parse_candidates, select_model, GofStatistic};
use cfarkit::simulator::{gen_scene, Background, SceneSpec};

fn main() -> cfarkit::Result<()> {
    let candidates = parse_candidates("exp,gamma,weibull:shape=2,lognormal,k:n=1,g0:n=1")?;
    for background in [
        Background::Homogeneous { c: 2.0 },
        Background::Heterogeneous { shape: 2.0, rate: 2.0 },
        Background::ExtremelyHeterogeneous { shape: 3.0, gamma: 2.0 },
    ] {
        let spec = SceneSpec { width: 100, height: 100, looks: 1, background, targets: vec![], seed: 5 };
        let px: Vec<f64> = gen_scene(&spec)?.0.real().unwrap().iter().copied().collect();
        println!("{background:?}");
        for statistic in [GofStatistic::Cvm, GofStatistic::Ad] {
            let sel = select_model(&px, &candidates, statistic)?;
            for (i, r) in sel.ranked.iter().take(3).enumerate() {
                println!("  {statistic:?} #{} {:<14} {:>10.4}  {}", i + 1, r.spec.to_string(), r.score, r.model);
            }
            for (spec, why) in &sel.skipped {
                println!("  {statistic:?} skipped {spec}: {why}");
            }
        }
    }
    Ok(())
}
