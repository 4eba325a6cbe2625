//! Four waves sharing one β, with ω shared in pairs.
//!
//! The reduced grid (24×12, five rounds) keeps the run short.

use fmm::{fit_restricted, FitConfig, GenSpec, TimeSeries};

fn main() -> fmm::Result<()> {
    let spec = GenSpec::new(
        3.0,
        vec![4.5, 3.0, 1.0, 1.5],
        vec![1.5, 4.2, 2.0, 4.7],
        vec![3.0],
        vec![0.01, 0.01, 0.15, 0.15],
    )
    .with_noise(0.3, Some(1115));
    let sim = fmm::generate(&spec)?;
    let data = TimeSeries::new(sim.t, sim.y)?;

    let cfg = FitConfig::new(4)
        .with_beta_blocks(vec![1, 1, 1, 1])
        .with_omega_blocks(vec![1, 1, 2, 2])
        .with_grid(24, 12)
        .with_num_reps(5);
    let result = fit_restricted(&data, &cfg)?;

    for (j, w) in result.model.waves.iter().enumerate() {
        println!(
            "wave {}: A={:.3} alpha={:.3} beta={:.4} omega={:.4} R2={:.4}",
            j + 1,
            w.amplitude,
            w.alpha,
            w.beta,
            w.omega,
            result.r2[j]
        );
    }
    println!("R2_total = {:.4}", result.r2_total);
    println!("grid evaluations: {}", result.diagnostics.grid_evaluations);
    Ok(())
}
