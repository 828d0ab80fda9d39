//! Boundary-ring mean and spread maps via direct and FFT convolution, with
//! timings across stencil sizes.

use std::time::Instant;

use cfarkit::engine::{local_stats, EngineChoice};
use cfarkit::simulator::{gen_scene, SceneSpec};
use cfarkit::stencil::StencilSpec;

fn main() -> cfarkit::Result<()> {
    let (img, _) = gen_scene(&SceneSpec::homogeneous(1024, 1024, 9))?;
    let grid = img.real().unwrap();
    for s in ["1x1/1/1", "1x1/2/4", "3x3/4/8", "5x5/8/12"] {
        let st: StencilSpec = s.parse()?;
        let kernels = st.build_kernels();
        let t = Instant::now();
        let a = local_stats(grid, &kernels, EngineChoice::Spatial)?;
        let ts = t.elapsed();
        let t = Instant::now();
        let b = local_stats(grid, &kernels, EngineChoice::Fft)?;
        let tf = t.elapsed();
        let worst = a
            .mean
            .iter()
            .zip(b.mean.iter())
            .filter(|(x, _)| x.is_finite())
            .map(|(x, y)| ((x - y) / x).abs())
            .fold(0.0, f64::max);
        println!(
            "{s:<9} area {:>4}  spatial {:>8.1?}  fft {:>8.1?}  auto picks {:?}  max rel diff {worst:.1e}",
            st.area(),
            ts,
            tf,
            EngineChoice::Auto.resolve(st.area(), cfarkit::engine::DEFAULT_CROSSOVER)
        );
    }
    Ok(())
}
