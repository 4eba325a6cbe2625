//! Two days of hourly measurements averaged into one 24 h period and fitted.

use fmm::io::{parse_csv, CsvOptions};
use fmm::{fit, FitConfig, FmmModel, WaveParams};

fn main() -> fmm::Result<()> {
    // a sharp morning rise on top of a broad daily rhythm, sampled every hour from 06:00
    let truth = FmmModel::new(
        36.8,
        vec![
            WaveParams::new(0.5, 2.6, 4.0, 0.15)?,
            WaveParams::new(0.3, 5.0, 3.1, 0.9)?,
        ],
    )?;
    let mut body = String::from("hour,temperature\n");
    for h in 0..48 {
        let hour = 6.0 + h as f64;
        let t = (hour - 6.0) * std::f64::consts::TAU / 24.0 % std::f64::consts::TAU;
        let wobble = 0.02 * ((h * 7919) % 13) as f64 / 13.0 - 0.01;
        body.push_str(&format!("{hour},{}\n", truth.value(t) + wobble));
    }

    let opts = CsvOptions {
        n_periods: 2,
        period: Some(24.0),
        t0: 6.0,
        ..Default::default()
    };
    let data = parse_csv(body.as_bytes(), &opts)?;
    println!(
        "{} periods folded into {} points",
        data.n_periods(),
        data.len()
    );

    let result = fit(&data, &FitConfig::new(2).with_maxiter(4))?;
    for (w, p) in result.model.waves.iter().zip(&result.peaks.waves) {
        let clock = |t: f64| (6.0 + t * 24.0 / std::f64::consts::TAU) % 24.0;
        println!(
            "wave A={:.3} omega={:.3}: peak at {:05.2} h, trough at {:05.2} h",
            w.amplitude,
            w.omega,
            clock(p.t_upper),
            clock(p.t_lower)
        );
    }
    println!("R2_total = {:.4}", result.r2_total);
    Ok(())
}
