//! Shared numerical kernels: adaptive quadrature, bracketed root finding,
//! 1-D maximization and the Gamma-family special functions.
//!
//! Everything here is a pure function of its arguments.

mod optimize;
mod quad;
mod special;

pub use optimize::{find_root_monotone, maximize_unimodal, Bracket, Maximum, Root};
pub use quad::{
    integrate_finite, integrate_semi_infinite, QuadResult, ABS_ERROR_FLOOR, DEFAULT_REL_TOL, MAX_SUBDIVISIONS,
};
pub use special::{digamma, gamma_fn, log_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma, EULER_MASCHERONI};
