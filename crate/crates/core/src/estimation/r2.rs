use crate::error::{FmmError, Result};
use crate::io::TimeSeries;
use crate::signal::FmmModel;

/// `1 − Σ(X − X̂)² / Σ(X − X̄)²`.
pub fn r_squared(data: &[f64], fitted: &[f64]) -> Result<f64> {
    if data.len() != fitted.len() || data.len() < 2 {
        return Err(FmmError::config(format!(
            "R² needs two equal-length vectors of length >= 2 (got {} and {})",
            data.len(),
            fitted.len()
        )));
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let tss: f64 = data.iter().map(|x| (x - mean).powi(2)).sum();
    if !(tss > 0.0) {
        return Err(FmmError::UndefinedVariance);
    }
    let sse: f64 = data.iter().zip(fitted).map(|(x, f)| (x - f).powi(2)).sum();
    Ok(1.0 - sse / tss)
}

/// Greedy incremental split of the model's explained variance across waves.
///
/// For a subset `S` of waves, the cumulative `R²(S)` keeps the fitted
/// amplitudes and refits only the intercept. The wave with the largest
/// `R²({J})` is credited with it; each following pick is the wave that raises
/// the cumulative value most, credited with that increase. With all waves
/// selected the cumulative value equals the model's total `R²` whenever the
/// model intercept is the least-squares one. Values are returned in model order.
pub fn attribute_wave_r2(data: &TimeSeries, model: &FmmModel) -> Result<Vec<f64>> {
    let x = data.values();
    let t = data.time_points();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let tss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if !(tss > 0.0) {
        return Err(FmmError::UndefinedVariance);
    }
    let m = model.order();
    let components: Vec<Vec<f64>> = (0..m).map(|j| model.component_values(j, t)).collect();

    // residual of the data after removing the selected waves
    let mut partial: Vec<f64> = x.to_vec();
    let centred_r2 = |r: &[f64]| {
        let mu = r.iter().sum::<f64>() / n;
        1.0 - r.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / tss
    };

    let mut selected = vec![false; m];
    let mut credit = vec![0.0; m];
    let mut cumulative = 0.0;
    for _ in 0..m {
        let (best, best_r2) = (0..m)
            .filter(|&j| !selected[j])
            .map(|j| {
                let trial: Vec<f64> = partial
                    .iter()
                    .zip(&components[j])
                    .map(|(p, c)| p - c)
                    .collect();
                (j, centred_r2(&trial))
            })
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, c| {
                if c.1 > acc.1 {
                    c
                } else {
                    acc
                }
            });
        selected[best] = true;
        credit[best] = best_r2 - cumulative;
        cumulative = best_r2;
        for (p, c) in partial.iter_mut().zip(&components[best]) {
            *p -= c;
        }
    }
    Ok(credit)
}
