//! Angle helpers shared by the model, the optimizer and the restricted fits.

use std::f64::consts::{PI, TAU};

use crate::error::{FmmError, Result};

/// Resultant lengths below this make the angular mean meaningless.
pub const MIN_RESULTANT: f64 = 1e-9;

/// Wraps any finite angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = ((x % TAU) + TAU) % TAU;
    // (x % 2π) + 2π can round up to exactly 2π for tiny negative x
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// Direction of the mean resultant vector, wrapped to `[0, 2π)`.
///
/// Fails with [`FmmError::UndefinedMean`] when the angles cancel out
/// (e.g. `{0, π}`), and with a config error on an empty slice.
pub fn angular_mean(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(FmmError::config("angular mean of an empty set"));
    }
    let n = angles.len() as f64;
    let (s, c) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
    let (s, c) = (s / n, c / n);
    let resultant = s.hypot(c);
    if resultant < MIN_RESULTANT {
        return Err(FmmError::UndefinedMean(resultant));
    }
    Ok(wrap_angle(s.atan2(c)))
}
