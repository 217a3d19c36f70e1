//! Quadrature reference paths.
//!
//! [`mutual_impedance_oracle`] integrates the induced-EMF integral directly,
//! with the source field taken from [`closed_field_e`]. It shares no code
//! with the exponential-integral evaluation and also covers coaxial pairs.
//!
//! [`field_by_finite_differences`] checks the field itself: it applies
//! (d^2/dz^2 + k^2) to the vector-potential integral of the sinusoidal
//! current with a five-point stencil.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::closed::{closed_field_e, guarded_sin};
use crate::constants::ETA0;
use crate::error::Result;
use crate::geometry::{pair_geometry, Dipole, PairGeometry};
use crate::special::adaptive_quad_with_breaks;

/// Mutual impedance z_qp (ohms) by adaptive quadrature along the observer
/// wire, to relative tolerance `rel_tol`.
pub fn mutual_impedance_oracle(
    p: &Dipole,
    q: &Dipole,
    same: bool,
    k: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let geom = pair_geometry(p, q, same);
    let sin_q = guarded_sin(geom.h_q, k)?;
    guarded_sin(geom.h_p, k)?;
    impedance_oracle_from_geometry(&geom, sin_q, k, rel_tol)
}

pub(crate) fn impedance_oracle_from_geometry(
    geom: &PairGeometry,
    sin_q: f64,
    k: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let hq = geom.h_q;
    // kink of the observer current and the three field peaks
    let breaks = [0.0, geom.h_p - geom.dz, -geom.dz, -geom.h_p - geom.dz];
    let integral = adaptive_quad_with_breaks(
        |z: f64| {
            let current = (k * (hq - z.abs())).sin() / sin_q;
            // closed_field_e only fails at R = 0, excluded by the scene
            // invariants; NaN here surfaces as a quadrature error
            closed_field_e(z, geom, k).unwrap_or(Complex64::new(f64::NAN, f64::NAN)) * current
        },
        -hq,
        hq,
        &breaks,
        rel_tol,
    )?;
    Ok(Complex64::new(0.0, ETA0 / (4.0 * PI * k)) * integral)
}

/// Vector-potential integral of the sinusoidal source current, observed at
/// offset `z` on the observer axis.
pub fn source_potential(z: f64, geom: &PairGeometry, k: f64, rel_tol: f64) -> Result<Complex64> {
    let hp = geom.h_p;
    let sin_p = guarded_sin(hp, k)?;
    let t = geom.dz + z;
    adaptive_quad_with_breaks(
        |xi: f64| {
            let r = geom.rho.hypot(t - xi);
            Complex64::from_polar(1.0 / r, -k * r) * ((k * (hp - xi.abs())).sin() / sin_p)
        },
        -hp,
        hp,
        &[0.0],
        rel_tol,
    )
}

/// (d^2/dz^2 + k^2) of [`source_potential`] by a five-point central stencil
/// of width `step`; comparable with [`closed_field_e`].
pub fn field_by_finite_differences(
    z: f64,
    geom: &PairGeometry,
    k: f64,
    step: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let a = |dz: f64| source_potential(z + dz, geom, k, rel_tol);
    let (m2, m1, c, p1, p2) = (
        a(-2.0 * step)?,
        a(-step)?,
        a(0.0)?,
        a(step)?,
        a(2.0 * step)?,
    );
    let second = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * step * step);
    Ok(second + k * k * c)
}
