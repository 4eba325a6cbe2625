//! Numeric kernels behind the FMM fits: grid search, Nelder–Mead,
//! the linearised single-wave least squares and the nonnegative joint fit.

pub mod grid;
pub mod linear;
pub mod nnls;
pub mod simplex;

pub use grid::{grid_minimize, select_best, GridPoint, GridSpec, OMEGA_FLOOR};
pub use linear::{linearized_ls, recover_wave, LinearFit};
pub use nnls::{nonneg_joint_ls, JointFit};
pub use simplex::{nelder_mead, simplex_minimize, AlphaOmegaMin, SimplexConfig, SimplexResult};
