//! Special functions and quadrature.

mod e1;
mod quad;

pub use e1::{exp_integral_e1, BRANCH_CUT_MARGIN, EULER_GAMMA, SERIES_RADIUS};
pub use quad::{adaptive_quad, adaptive_quad_with_breaks, MAX_INTERVALS};
