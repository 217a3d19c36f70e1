//! Mutual coupling of reconfigurable surfaces built from z-directed thin-wire
//! dipoles with sinusoidal currents.
//!
//! The impedance between two wires is evaluated in closed form through the
//! complex exponential integral E1, with an adaptive-quadrature path of the
//! induced-EMF integral kept alongside as an independent check. On top of the
//! impedances, [`channel`] evaluates the transmitter-to-receiver transfer
//! function through the surface and tunes the surface loads.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod channel;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod impedance;
pub mod linalg;
pub mod special;

pub use num_complex::Complex64;

pub use channel::{
    end_to_end, optimize_tuning, ChannelResult, Objective, OptimizeOptions, Optimized, TuningState,
};
pub use error::{Error, Result};
pub use geometry::{build_grid, pair_geometry, Dipole, GridPlane, GridSpec, PairGeometry, Scene};
pub use impedance::{
    assemble_impedances, assemble_impedances_with_tol, closed_field_e, kernel_i_qp,
    mutual_impedance, mutual_impedance_closed, mutual_impedance_oracle, notable_integral_j,
    ImpedanceSet, KernelIntegralArgs,
};
pub use linalg::CMatrix;
pub use special::{adaptive_quad, exp_integral_e1};

/// Complex quantity (impedance in ohms, field per unit current, ...).
pub type ComplexValue = Complex64;
