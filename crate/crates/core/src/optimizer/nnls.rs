//! Joint intercept/amplitude fit with nonnegative amplitudes.
//!
//! The free intercept is eliminated by centring, then the amplitudes are
//! found with the Lawson–Hanson active-set method.

use nalgebra::{DMatrix, DVector};

use crate::error::{FmmError, Result};

/// Relative size of the smallest admissible R diagonal in the rank check.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct JointFit {
    pub intercept: f64,
    pub amplitudes: Vec<f64>,
    pub rss: f64,
}

/// Minimises `Σ (x − M − Σ_J A_J·Φ_J)²` over free `M` and `A_J ≥ 0`.
///
/// `columns[j]` holds `Φ_j` evaluated at each observation.
pub fn nonneg_joint_ls(x: &[f64], columns: &[Vec<f64>]) -> Result<JointFit> {
    let n = x.len();
    let m = columns.len();
    if m == 0 || n <= m + 1 {
        return Err(FmmError::config(format!(
            "joint fit needs n > m + 1 observations (n = {n}, m = {m})"
        )));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(FmmError::config(
            "design columns must match the data length",
        ));
    }

    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let col_means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / nf).collect();
    let design = DMatrix::from_fn(n, m, |i, j| columns[j][i] - col_means[j]);
    let target = DVector::from_iterator(n, x.iter().map(|v| v - x_mean));

    check_rank(&design)?;
    let amplitudes = lawson_hanson(&design, &target);

    let intercept = x_mean
        - amplitudes
            .iter()
            .zip(&col_means)
            .map(|(a, mu)| a * mu)
            .sum::<f64>();
    let rss = (0..n)
        .map(|i| {
            let fit = intercept + (0..m).map(|j| amplitudes[j] * columns[j][i]).sum::<f64>();
            (x[i] - fit).powi(2)
        })
        .sum();
    Ok(JointFit {
        intercept,
        amplitudes,
        rss,
    })
}

fn check_rank(design: &DMatrix<f64>) -> Result<()> {
    let r = design.clone().qr().r();
    let diag: Vec<f64> = (0..r.ncols().min(r.nrows()))
        .map(|k| r[(k, k)].abs())
        .collect();
    let scale = diag.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 || diag.iter().any(|d| *d <= RANK_TOL * scale) {
        return Err(FmmError::DegenerateDesign(
            "wave columns are linearly dependent once the intercept is removed".into(),
        ));
    }
    Ok(())
}

/// Unconstrained least squares restricted to the `passive` columns.
fn solve_passive(design: &DMatrix<f64>, target: &DVector<f64>, passive: &[usize]) -> Vec<f64> {
    let sub = design.select_columns(passive);
    let sol = sub
        .svd(true, true)
        .solve(target, f64::EPSILON)
        .expect("svd computed with both factors");
    sol.iter().copied().collect()
}

fn lawson_hanson(design: &DMatrix<f64>, target: &DVector<f64>) -> Vec<f64> {
    let m = design.ncols();
    let mut a = vec![0.0; m];
    let mut passive = vec![false; m];
    let scale = design.norm() * target.norm();
    let tol = 10.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE) * m as f64;
    let max_outer = 3 * m + 10;

    for _ in 0..max_outer {
        let residual = target - design * DVector::from_column_slice(&a);
        let grad = design.transpose() * residual;
        let candidate = (0..m)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = candidate else { break };
        if grad[j] <= tol {
            break;
        }
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let sol = solve_passive(design, target, &idx);
            if sol.iter().all(|&s| s > 0.0) {
                for (k, s) in idx.iter().zip(sol) {
                    a[*k] = s;
                }
                break;
            }
            // step from a toward the unconstrained solution until a coordinate hits zero
            let mut step = 1.0f64;
            for (k, s) in idx.iter().zip(&sol) {
                if *s <= 0.0 {
                    let denom = a[*k] - s;
                    if denom > 0.0 {
                        step = step.min(a[*k] / denom);
                    } else {
                        step = 0.0;
                    }
                }
            }
            for (k, s) in idx.iter().zip(&sol) {
                a[*k] += step * (s - a[*k]);
            }
            for &k in &idx {
                if a[k] <= tol.min(1e-14) {
                    a[k] = 0.0;
                    passive[k] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cols(n: usize) -> Vec<Vec<f64>> {
        let t: Vec<f64> = (0..n)
            .map(|i| i as f64 * std::f64::consts::TAU / n as f64)
            .collect();
        vec![
            t.iter().map(|v| (v - 0.3).cos()).collect(),
            t.iter().map(|v| (2.0 * v + 1.0).cos()).collect(),
        ]
    }

    fn rss_of(x: &[f64], c: &[Vec<f64>], m: f64, a: &[f64]) -> f64 {
        (0..x.len())
            .map(|i| {
                let f = m + (0..a.len()).map(|j| a[j] * c[j][i]).sum::<f64>();
                (x[i] - f).powi(2)
            })
            .sum()
    }

    /// Independent route for two columns: every active set, solved by Cramer's rule.
    fn enumerate_two(x: &[f64], c: &[Vec<f64>]) -> (f64, [f64; 2], f64) {
        let n = x.len() as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let (xm, m0, m1) = (mean(x), mean(&c[0]), mean(&c[1]));
        let dot = |p: &[f64], pm: f64, q: &[f64], qm: f64| {
            p.iter()
                .zip(q)
                .map(|(a, b)| (a - pm) * (b - qm))
                .sum::<f64>()
        };
        let (s00, s11, s01) = (
            dot(&c[0], m0, &c[0], m0),
            dot(&c[1], m1, &c[1], m1),
            dot(&c[0], m0, &c[1], m1),
        );
        let (s0x, s1x) = (dot(&c[0], m0, x, xm), dot(&c[1], m1, x, xm));
        let mut cands = vec![[0.0, 0.0], [s0x / s00, 0.0], [0.0, s1x / s11]];
        let det = s00 * s11 - s01 * s01;
        cands.push([(s11 * s0x - s01 * s1x) / det, (s00 * s1x - s01 * s0x) / det]);
        cands
            .into_iter()
            .filter(|a| a[0] >= 0.0 && a[1] >= 0.0)
            .map(|a| {
                let m = xm - a[0] * m0 - a[1] * m1;
                (m, a, rss_of(x, c, m, &a))
            })
            .min_by(|p, q| p.2.total_cmp(&q.2))
            .unwrap()
    }

    #[test]
    fn recovers_exact_combination() {
        let c = cols(60);
        let x: Vec<f64> = (0..60)
            .map(|i| 1.0 + 2.0 * c[0][i] + 3.0 * c[1][i])
            .collect();
        let f = nonneg_joint_ls(&x, &c).unwrap();
        assert!((f.intercept - 1.0).abs() < 1e-10);
        assert!((f.amplitudes[0] - 2.0).abs() < 1e-10);
        assert!((f.amplitudes[1] - 3.0).abs() < 1e-10);
        assert!(f.rss < 1e-18);
    }

    #[test]
    fn negative_unconstrained_coefficient_is_clipped() {
        let c = cols(60);
        let x: Vec<f64> = (0..60)
            .map(|i| 0.5 + 2.0 * c[0][i] - 1.5 * c[1][i] + 0.1 * ((i * 7 % 11) as f64 - 5.0) / 5.0)
            .collect();
        let f = nonneg_joint_ls(&x, &c).unwrap();
        let (m, a, rss) = enumerate_two(&x, &c);
        assert_eq!(f.amplitudes[1], 0.0);
        assert!((f.amplitudes[0] - a[0]).abs() < 1e-10);
        assert!((f.intercept - m).abs() < 1e-10);
        assert!((f.rss - rss).abs() < 1e-10 * rss.max(1.0));
    }

    #[test]
    fn matches_enumeration_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = cols(40);
        for _ in 0..200 {
            let (b0, b1, m) = (
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-2.0..2.0),
            );
            let x: Vec<f64> = (0..40)
                .map(|i| m + b0 * c[0][i] + b1 * c[1][i] + rng.random_range(-0.5..0.5))
                .collect();
            let f = nonneg_joint_ls(&x, &c).unwrap();
            let (_, _, rss) = enumerate_two(&x, &c);
            assert!(
                (f.rss - rss).abs() <= 1e-9 * rss.max(1.0),
                "{} vs {}",
                f.rss,
                rss
            );
            assert!(f.amplitudes.iter().all(|a| *a >= 0.0));

            // KKT: zeroed amplitudes have a nonnegative gradient of the RSS
            let r: Vec<f64> = (0..40)
                .map(|i| x[i] - f.intercept - f.amplitudes[0] * c[0][i] - f.amplitudes[1] * c[1][i])
                .collect();
            for j in 0..2 {
                if f.amplitudes[j] == 0.0 {
                    let g: f64 = -2.0 * c[j].iter().zip(&r).map(|(a, b)| a * b).sum::<f64>();
                    assert!(g >= -1e-9);
                }
            }
            // never worse than all-zero amplitudes
            let xm = x.iter().sum::<f64>() / 40.0;
            assert!(f.rss <= rss_of(&x, &c, xm, &[0.0, 0.0]) + 1e-12);
        }
    }

    #[test]
    fn single_column_closed_form() {
        let c = vec![cols(50)[0].clone()];
        for sign in [1.0, -1.0] {
            let x: Vec<f64> = (0..50)
                .map(|i| 2.0 + sign * 1.7 * c[0][i] + 0.01 * (i % 3) as f64)
                .collect();
            let f = nonneg_joint_ls(&x, &c).unwrap();
            let n = 50.0;
            let (xm, cm) = (x.iter().sum::<f64>() / n, c[0].iter().sum::<f64>() / n);
            let cov: f64 = x.iter().zip(&c[0]).map(|(a, b)| (a - xm) * (b - cm)).sum();
            let var: f64 = c[0].iter().map(|b| (b - cm).powi(2)).sum();
            let expected = (cov / var).max(0.0);
            assert!((f.amplitudes[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficiency_is_an_error() {
        let c = cols(30);
        let dup = vec![c[0].clone(), c[0].iter().map(|v| 2.0 * v + 1.0).collect()];
        let x = vec![1.0; 30];
        assert!(matches!(
            nonneg_joint_ls(&x, &dup),
            Err(FmmError::DegenerateDesign(_))
        ));
        assert!(nonneg_joint_ls(
            &[1.0, 2.0, 3.0],
            &c.iter().map(|v| v[..3].to_vec()).collect::<Vec<_>>()
        )
        .is_err());
    }
}
