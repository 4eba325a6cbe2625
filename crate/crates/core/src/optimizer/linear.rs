//! Closed-form pieces of the single-wave fit: for fixed (α, ω) the wave is
//! linear in `M + δ·cos(t*) + γ·sin(t*)`.

use crate::circular::wrap_angle;
use crate::error::{FmmError, Result};
use crate::signal::unwrapped_shift;

/// Relative threshold on `det / (Szz·Sww)` below which the design is rank deficient.
const COLLINEAR_TOL: f64 = 1e-12;

/// Ordinary least-squares fit of `X ~ 1 + z + w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub delta: f64,
    pub gamma: f64,
    pub rss: f64,
}

/// Least squares of `x` on an intercept, `z` and `w`.
///
/// Solved in centred form, so the intercept is the exact OLS one
/// (`x̄ − δ·z̄ − γ·w̄`). The RSS is summed directly from the residuals.
pub fn linearized_ls(x: &[f64], z: &[f64], w: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 3 || z.len() != n || w.len() != n {
        return Err(FmmError::config(format!(
            "linearized least squares needs three equal-length vectors with n >= 3 (got {}, {}, {})",
            n,
            z.len(),
            w.len()
        )));
    }
    let nf = n as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let zm = z.iter().sum::<f64>() / nf;
    let wm = w.iter().sum::<f64>() / nf;
    let (mut szz, mut sww, mut szw, mut szx, mut swx) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (dz, dw, dx) = (z[i] - zm, w[i] - wm, x[i] - xm);
        szz += dz * dz;
        sww += dw * dw;
        szw += dz * dw;
        szx += dz * dx;
        swx += dw * dx;
    }
    let det = szz * sww - szw * szw;
    if !(szz > 0.0 && sww > 0.0) || !(det > COLLINEAR_TOL * szz * sww) {
        return Err(FmmError::DegenerateDesign(
            "columns [1, cos t*, sin t*] are collinear".into(),
        ));
    }
    let delta = (sww * szx - szw * swx) / det;
    let gamma = (szz * swx - szw * szx) / det;
    let intercept = xm - delta * zm - gamma * wm;
    let rss = (0..n)
        .map(|i| {
            let r = x[i] - intercept - delta * z[i] - gamma * w[i];
            r * r
        })
        .sum();
    Ok(LinearFit {
        intercept,
        delta,
        gamma,
        rss,
    })
}

/// `(M, A, β)` from the linear coefficients at a given α.
///
/// `δ = A·cos φ`, `γ = −A·sin φ`, `β = α + φ`.
pub fn recover_wave(intercept: f64, delta: f64, gamma: f64, alpha: f64) -> (f64, f64, f64) {
    let amplitude = delta.hypot(gamma);
    let phi = (-gamma).atan2(delta);
    (intercept, amplitude, wrap_angle(alpha + phi))
}

/// The warped-time regressors `cos(t*)` and `sin(t*)`, with
/// `t* = α + 2·arctan(ω·tan((t − α)/2))`.
pub fn warped_design(t: &[f64], alpha: f64, omega: f64) -> (Vec<f64>, Vec<f64>) {
    t.iter()
        .map(|&ti| (alpha + unwrapped_shift(ti - alpha, omega)).sin_cos())
        .map(|(s, c)| (c, s))
        .unzip()
}

/// Linear fit of `x` at fixed `(α, ω)`.
pub fn fit_at(t: &[f64], x: &[f64], alpha: f64, omega: f64) -> Result<LinearFit> {
    let (z, w) = warped_design(t, alpha, omega);
    linearized_ls(x, &z, &w)
}

/// Profiled objective for the (α, ω) search: RSS of the best linear fit,
/// `+∞` when the design is degenerate.
pub fn profile_rss(t: &[f64], x: &[f64], alpha: f64, omega: f64) -> f64 {
    fit_at(t, x, alpha, omega).map_or(f64::INFINITY, |f| f.rss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(n: usize) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.37).collect();
        warped_design(&t, 0.8, 0.4)
    }

    /// Independent route: explicit 3x3 normal equations by Gaussian elimination.
    fn normal_equations(x: &[f64], z: &[f64], w: &[f64]) -> ([f64; 3], f64) {
        let cols = [vec![1.0; x.len()], z.to_vec(), w.to_vec()];
        let mut a = [[0.0; 4]; 3];
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] = cols[r].iter().zip(&cols[c]).map(|(p, q)| p * q).sum();
            }
            a[r][3] = cols[r].iter().zip(x).map(|(p, q)| p * q).sum();
        }
        for k in 0..3 {
            let p = (k..3)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            for r in 0..3 {
                if r != k {
                    let f = a[r][k] / a[k][k];
                    for c in 0..4 {
                        a[r][c] -= f * a[k][c];
                    }
                }
            }
        }
        let b = [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]];
        let rss = (0..x.len())
            .map(|i| (x[i] - b[0] - b[1] * z[i] - b[2] * w[i]).powi(2))
            .sum();
        (b, rss)
    }

    #[test]
    fn exact_linear_model() {
        let (z, w) = design(40);
        let x: Vec<f64> = z.iter().zip(&w).map(|(z, w)| 3.0 + 2.0 * z - w).collect();
        let f = linearized_ls(&x, &z, &w).unwrap();
        assert!((f.intercept - 3.0).abs() < 1e-12);
        assert!((f.delta - 2.0).abs() < 1e-12);
        assert!((f.gamma + 1.0).abs() < 1e-12);
        assert!(f.rss < 1e-24);
    }

    #[test]
    fn constant_data() {
        let (z, w) = design(30);
        let f = linearized_ls(&[4.5; 30], &z, &w).unwrap();
        assert!((f.intercept - 4.5).abs() < 1e-12);
        assert!(f.delta.abs() < 1e-12 && f.gamma.abs() < 1e-12);
        assert!(f.rss < 1e-24);
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (z, w) = design(50);
        let x: Vec<f64> = (0..50).map(|_| rng.random_range(-3.0..3.0)).collect();
        let f = linearized_ls(&x, &z, &w).unwrap();
        let (b, rss) = normal_equations(&x, &z, &w);
        assert!((f.rss - rss).abs() <= 1e-8 * rss);
        assert!((f.intercept - b[0]).abs() < 1e-9);
        assert!((f.delta - b[1]).abs() < 1e-9);
        assert!((f.gamma - b[2]).abs() < 1e-9);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let z: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let w: Vec<f64> = z.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!(matches!(
            linearized_ls(&[1.0; 10], &z, &w),
            Err(FmmError::DegenerateDesign(_))
        ));
        assert!(linearized_ls(&[1.0; 10], &[0.5; 10], &z).is_err());
        assert!(linearized_ls(&[1.0, 2.0], &[0.0, 1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn recover_examples() {
        let (m, a, b) = recover_wave(0.5, 2.0, 0.0, 1.0);
        assert_eq!((m, a), (0.5, 2.0));
        assert!((b - 1.0).abs() < 1e-15);
        let (_, a, b) = recover_wave(0.0, 0.0, -1.0, 0.0);
        assert!((a - 1.0).abs() < 1e-15);
        assert!((b - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn warped_design_at_unit_omega_is_plain_time() {
        let t = [0.0, 1.0, 2.5, 6.0];
        let (z, w) = warped_design(&t, 1.3, 1.0);
        for i in 0..t.len() {
            assert!((z[i] - t[i].cos()).abs() < 1e-12);
            assert!((w[i] - t[i].sin()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_design(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (z, w) = design(60);
            let x: Vec<f64> = (0..60).map(|_| rng.random_range(-10.0..10.0)).collect();
            let f = linearized_ls(&x, &z, &w).unwrap();
            let r: Vec<f64> = (0..60).map(|i| x[i] - f.intercept - f.delta * z[i] - f.gamma * w[i]).collect();
            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for col in [vec![1.0; 60], z.clone(), w.clone()] {
                let dot: f64 = col.iter().zip(&r).map(|(c, r)| c * r).sum();
                prop_assert!(dot.abs() <= 1e-8 * xnorm);
            }
        }

        #[test]
        fn recover_round_trip(delta in -5.0f64..5.0, gamma in -5.0f64..5.0, alpha in 0.0f64..std::f64::consts::TAU) {
            let (_, a, beta) = recover_wave(0.0, delta, gamma, alpha);
            let phi = beta - alpha;
            prop_assert!((a * phi.cos() - delta).abs() < 1e-12);
            prop_assert!((-a * phi.sin() - gamma).abs() < 1e-12);
        }
    }
}
