//! Backfit a two-wave model and print a summary with per-wave R².

use fmm::{fit_multi, FitConfig, GenSpec, StopRule, TimeSeries};

fn main() -> fmm::Result<()> {
    // A = (2) is recycled to both waves
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

    let fixed = fit_multi(&data, &FitConfig::new(2))?;
    println!("{}", fixed.stop_message());

    let cfg = FitConfig::new(2)
        .with_maxiter(5)
        .with_stop_rule(StopRule::R2Delta(0.01));
    let result = fit_multi(&data, &cfg)?;
    println!("{}", result.stop_message());

    println!("M (Intercept): {:.4}", result.model.intercept);
    println!(
        "{:>12} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "", "A", "alpha", "beta", "omega", "R2"
    );
    for (j, (w, r2)) in result.model.waves.iter().zip(&result.r2).enumerate() {
        println!(
            "FMM wave {}: {:8.4} {:8.4} {:8.4} {:8.4} {:8.4}",
            j + 1,
            w.amplitude,
            w.alpha,
            w.beta,
            w.omega,
            r2
        );
    }
    println!("Total R2: {:.4}", result.r2_total);
    Ok(())
}
