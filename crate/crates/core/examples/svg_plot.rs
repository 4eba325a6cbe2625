//! Render a fit and its components to SVG.

use fmm::plot::{render_svg, PlotOptions};
use fmm::{fit, FitConfig, GenSpec, TimeSeries};

fn main() -> fmm::Result<()> {
    let spec = GenSpec::new(
        0.0,
        vec![2.0],
        vec![1.5, 3.4],
        vec![0.2, 2.3],
        vec![0.1, 0.2],
    )
    .with_noise(0.3, Some(15));
    let sim = fmm::generate(&spec)?;
    let data = TimeSeries::new(sim.t, sim.y)?;
    let result = fit(&data, &FitConfig::new(2))?;

    let svg = render_svg(&result, &data, PlotOptions { components: true })?;
    let path = std::env::temp_dir().join("fmm-fit.svg");
    std::fs::write(&path, svg).map_err(|source| fmm::FmmError::Io {
        path: path.clone(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(())
}
