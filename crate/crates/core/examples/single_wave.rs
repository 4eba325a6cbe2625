//! Fit one FMM wave to a noisy spike-like signal.

use fmm::{fit_mono, FitConfig, GenSpec, TimeSeries};

fn main() -> fmm::Result<()> {
    let spec = GenSpec::new(1.0, vec![2.0], vec![1.5], vec![0.2], vec![0.1])
        .with_range(0.0, 6.2, 120)
        .with_noise(0.1, Some(42));
    let sim = fmm::generate(&spec)?;
    let data = TimeSeries::new(sim.t, sim.y)?;

    let result = fit_mono(&data, &FitConfig::new(1), None)?;
    let w = result.model.waves[0];
    println!("M     = {:.4}", result.model.intercept);
    println!("A     = {:.4}  (true 2.0)", w.amplitude);
    println!("alpha = {:.4}  (true 1.5)", w.alpha);
    println!("beta  = {:.4}  (true 0.2)", w.beta);
    println!("omega = {:.4}  (true 0.1)", w.omega);
    println!("R2    = {:.4}", result.r2_total);
    Ok(())
}
