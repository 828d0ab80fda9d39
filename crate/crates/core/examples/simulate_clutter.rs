//! Draw homogeneous, K and G0 clutter and compare sample moments with the
//! pixel models the simulator claims to follow.

use cfarkit::simulator::{gen_scene, Background, SceneSpec};

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

fn main() -> cfarkit::Result<()> {
    let cases = [
        ("homogeneous, 1 look", Background::Homogeneous { c: 1.0 }, 1),
        ("homogeneous, 4 looks", Background::Homogeneous { c: 1.0 }, 4),
        ("K, shape 4", Background::Heterogeneous { shape: 4.0, rate: 4.0 }, 1),
        ("G0, shape 3", Background::ExtremelyHeterogeneous { shape: 3.0, gamma: 2.0 }, 1),
    ];
    for (name, background, looks) in cases {
        let spec = SceneSpec { width: 512, height: 512, looks, background, targets: vec![], seed: 1 };
        let (img, _) = gen_scene(&spec)?;
        let px: Vec<f64> = img.real().unwrap().iter().copied().collect();
        let (mean, var) = moments(&px);
        let model = background.pixel_model(looks)?;
        println!("{name:<22} mean {mean:.4} (model {:.4})  variance {var:.4}  model: {model}", model.mean());
    }
    Ok(())
}
