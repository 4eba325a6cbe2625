use std::cmp::Ordering;
use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{FmmError, Result};

/// Smallest ω the fitting routines ever propose.
pub const OMEGA_FLOOR: f64 = 1e-3;

/// Rectangular (α, ω) grid.
///
/// α values cover the half-open `alpha_range`, ω values the closed `omega_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    alpha_count: usize,
    omega_count: usize,
    alpha_range: (f64, f64),
    omega_range: (f64, f64),
}

impl GridSpec {
    pub fn new(
        alpha_count: usize,
        omega_count: usize,
        alpha_range: (f64, f64),
        omega_range: (f64, f64),
    ) -> Result<Self> {
        if alpha_count < 2 || omega_count < 2 {
            return Err(FmmError::config(format!(
                "grid needs at least 2 points per axis, got {alpha_count}x{omega_count}"
            )));
        }
        if !(alpha_range.0 < alpha_range.1) {
            return Err(FmmError::config("empty alpha range"));
        }
        let (lo, hi) = omega_range;
        if !(OMEGA_FLOOR..=1.0).contains(&lo) || !(OMEGA_FLOOR..=1.0).contains(&hi) || lo > hi {
            return Err(FmmError::config(format!(
                "omega range [{lo}, {hi}] must lie within [{OMEGA_FLOOR}, 1]"
            )));
        }
        Ok(GridSpec {
            alpha_count,
            omega_count,
            alpha_range,
            omega_range,
        })
    }

    /// Full-period grid: α over `[0, 2π)`, ω over `[OMEGA_FLOOR, 1]`.
    pub fn full(alpha_count: usize, omega_count: usize) -> Result<Self> {
        Self::new(alpha_count, omega_count, (0.0, TAU), (OMEGA_FLOOR, 1.0))
    }

    /// α-only grid with ω pinned to a single value.
    pub(crate) fn alpha_only(alpha_count: usize, alpha_range: (f64, f64), omega: f64) -> Self {
        GridSpec {
            alpha_count: alpha_count.max(1),
            omega_count: 1,
            alpha_range,
            omega_range: (omega, omega),
        }
    }

    pub fn alpha_count(&self) -> usize {
        self.alpha_count
    }

    pub fn omega_count(&self) -> usize {
        self.omega_count
    }

    pub fn len(&self) -> usize {
        self.alpha_count * self.omega_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alpha_step(&self) -> f64 {
        (self.alpha_range.1 - self.alpha_range.0) / self.alpha_count as f64
    }

    pub fn omega_step(&self) -> f64 {
        if self.omega_count < 2 {
            0.0
        } else {
            (self.omega_range.1 - self.omega_range.0) / (self.omega_count - 1) as f64
        }
    }

    pub fn alpha_at(&self, i: usize) -> f64 {
        self.alpha_range.0 + i as f64 * self.alpha_step()
    }

    pub fn omega_at(&self, j: usize) -> f64 {
        if j + 1 == self.omega_count {
            self.omega_range.1
        } else {
            self.omega_range.0 + j as f64 * self.omega_step()
        }
    }

    /// Grid of the same resolution spanning one step either side of `(alpha, omega)`.
    ///
    /// ω bounds are clipped to `[OMEGA_FLOOR, 1]`; a pinned-ω grid stays pinned.
    pub fn refined_around(&self, alpha: f64, omega: f64) -> GridSpec {
        let da = self.alpha_step();
        let alpha_range = (alpha - da, alpha + da);
        if self.omega_count < 2 {
            return GridSpec::alpha_only(self.alpha_count, alpha_range, omega);
        }
        let dw = self.omega_step();
        let omega_range = ((omega - dw).max(OMEGA_FLOOR), (omega + dw).min(1.0));
        GridSpec {
            alpha_count: self.alpha_count,
            omega_count: self.omega_count,
            alpha_range,
            omega_range,
        }
    }

    fn cell(&self, k: usize) -> (f64, f64) {
        let (j, i) = (k / self.alpha_count, k % self.alpha_count);
        (self.alpha_at(i), self.omega_at(j))
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub omega: f64,
    pub value: f64,
}

/// Total order used to pick the winning cell: lower objective, then smaller ω,
/// then smaller α. NaN objectives rank last.
pub(crate) fn cell_order(a: &GridPoint, b: &GridPoint) -> Ordering {
    let key = |p: &GridPoint| {
        if p.value.is_nan() {
            f64::INFINITY
        } else {
            p.value
        }
    };
    key(a)
        .total_cmp(&key(b))
        .then(a.omega.total_cmp(&b.omega))
        .then(a.alpha.total_cmp(&b.alpha))
}

/// Best cell under [`cell_order`]; independent of the order of `cells`.
pub fn select_best(cells: &[GridPoint]) -> Option<GridPoint> {
    cells.iter().copied().min_by(cell_order)
}

/// Evaluates `objective` on every grid cell and returns the best one.
///
/// With `parallel` set the cells are evaluated on the rayon pool; the
/// reduction is order-independent so the answer is bit-identical either way.
pub fn grid_minimize<F>(objective: F, spec: &GridSpec, parallel: bool) -> GridPoint
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let eval = |k: usize| {
        let (alpha, omega) = spec.cell(k);
        GridPoint {
            alpha,
            omega,
            value: objective(alpha, omega),
        }
    };
    let cells: Vec<GridPoint> = if parallel {
        (0..spec.len()).into_par_iter().map(eval).collect()
    } else {
        (0..spec.len()).map(eval).collect()
    };
    select_best(&cells).expect("grid has at least one cell")
}
