//! Closed-form mutual impedance in terms of the exponential integral.
//!
//! With the sinusoidal current written as a sum of two complex exponentials,
//! the induced-EMF integral reduces to kernel integrals of the form
//!
//! ```text
//! J(s0, d0, z0; L, U) = int_L^U exp(-j k s0 t) exp(-j k R) / R dt,
//!                       R = sqrt(d0^2 + (t - z0)^2)
//! ```
//!
//! and the substitution v = R + s0 (t - z0) turns each of those into a
//! difference of two E1 values on the positive imaginary axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::oracle::mutual_impedance_oracle;
use crate::constants::{DEFAULT_ORACLE_TOL, ETA0, RHO_MIN_WAVELENGTHS, SIN_MIN};
use crate::error::{Error, Result};
use crate::geometry::{pair_geometry, Dipole, PairGeometry};
use crate::special::exp_integral_e1;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Arguments of the kernel integral J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegralArgs {
    /// Sign of the exponential phase, +1 or -1.
    pub s0: f64,
    /// Transverse distance, meters.
    pub d0: f64,
    /// Axial offset of the source point, meters.
    pub z0: f64,
    /// Lower limit, meters.
    pub lower: f64,
    /// Upper limit, meters.
    pub upper: f64,
}

/// Transverse distance below which the closed form is not used.
pub fn rho_min(k: f64) -> f64 {
    RHO_MIN_WAVELENGTHS * 2.0 * PI / k
}

/// sin(k h) with the anti-resonance guard applied.
pub(crate) fn guarded_sin(half_length: f64, k: f64) -> Result<f64> {
    let kh = k * half_length;
    let s = kh.sin();
    if s.abs() <= SIN_MIN {
        return Err(Error::ResonantLength {
            half_length,
            kh,
            sin_kh: s.abs(),
        });
    }
    Ok(s)
}

/// R + s0 t with R = sqrt(d0^2 + t^2), free of cancellation when s0 t < 0.
fn shifted_radius(d0: f64, t: f64, s0: f64) -> f64 {
    let r = d0.hypot(t);
    if s0 * t >= 0.0 {
        r + t.abs()
    } else {
        d0 * d0 / (r + t.abs())
    }
}

/// The kernel integral J in closed form.
pub fn notable_integral_j(args: &KernelIntegralArgs, k: f64) -> Result<Complex64> {
    let KernelIntegralArgs {
        s0,
        d0,
        z0,
        lower,
        upper,
    } = *args;
    if s0 != 1.0 && s0 != -1.0 {
        return Err(Error::InvalidInput(format!(
            "s0 must be +1 or -1, got {s0}"
        )));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    if !(lower <= upper) {
        return Err(Error::InvalidInput(format!(
            "kernel integral limits out of order: [{lower}, {upper}]"
        )));
    }
    let rmin = rho_min(k);
    if !(d0 > rmin) {
        return Err(Error::DegenerateGeometry {
            rho: d0,
            rho_min: rmin,
        });
    }
    if lower == upper {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l0 = shifted_radius(d0, lower - z0, s0);
    let u0 = shifted_radius(d0, upper - z0, s0);
    let e_l = exp_integral_e1(J * (k * l0))?;
    let e_u = exp_integral_e1(J * (k * u0))?;
    let phase = Complex64::from_polar(1.0, -k * s0 * z0);
    Ok(s0 * phase * (e_l - e_u))
}

/// Kernel integral I_qp(xi_p; s0): the source term at `xi_p` integrated
/// against exp(-j s0 k |z|) over the observer wire.
pub fn kernel_i_qp(xi_p: f64, s0: f64, geom: &PairGeometry, k: f64) -> Result<Complex64> {
    let z0 = xi_p - geom.dz;
    let left = notable_integral_j(
        &KernelIntegralArgs {
            s0: -s0,
            d0: geom.rho,
            z0,
            lower: -geom.h_q,
            upper: 0.0,
        },
        k,
    )?;
    let right = notable_integral_j(
        &KernelIntegralArgs {
            s0,
            d0: geom.rho,
            z0,
            lower: 0.0,
            upper: geom.h_q,
        },
        k,
    )?;
    Ok(left + right)
}

fn spherical_wave(rho: f64, t: f64, k: f64) -> Result<Complex64> {
    let r = rho.hypot(t);
    if !(r > 0.0) {
        return Err(Error::DegenerateGeometry { rho, rho_min: 0.0 });
    }
    Ok(Complex64::from_polar(1.0 / r, -k * r))
}

/// Field of the sinusoidal source current observed at offset `z` along the
/// observer wire, per unit terminal current and without the -j eta/(4 pi k)
/// prefactor: k/sin(k h_p) [G(+h_p) + G(-h_p) - 2 cos(k h_p) G(0)].
pub fn closed_field_e(z: f64, geom: &PairGeometry, k: f64) -> Result<Complex64> {
    let hp = geom.h_p;
    let sin_p = guarded_sin(hp, k)?;
    let t = geom.dz + z;
    let g_plus = spherical_wave(geom.rho, t - hp, k)?;
    let g_minus = spherical_wave(geom.rho, t + hp, k)?;
    let cos_p = (k * hp).cos();
    let mut field = g_plus + g_minus;
    if cos_p != 0.0 {
        field -= 2.0 * cos_p * spherical_wave(geom.rho, t, k)?;
    }
    Ok(k / sin_p * field)
}

/// Mutual impedance z_qp (ohms) of observer `q` due to source `p`.
///
/// Pairs whose transverse distance falls below [`rho_min`] (coaxial wires)
/// are handed to the quadrature path.
pub fn mutual_impedance(p: &Dipole, q: &Dipole, same: bool, k: f64) -> Result<Complex64> {
    mutual_impedance_with_tol(p, q, same, k, DEFAULT_ORACLE_TOL)
}

/// [`mutual_impedance`] with an explicit tolerance for the quadrature fallback.
pub fn mutual_impedance_with_tol(
    p: &Dipole,
    q: &Dipole,
    same: bool,
    k: f64,
    oracle_tol: f64,
) -> Result<Complex64> {
    match mutual_impedance_closed(p, q, same, k) {
        Err(Error::DegenerateGeometry { .. }) => mutual_impedance_oracle(p, q, same, k, oracle_tol),
        other => other,
    }
}

/// Closed form only; degenerate pairs are an error instead of a fallback.
pub fn mutual_impedance_closed(p: &Dipole, q: &Dipole, same: bool, k: f64) -> Result<Complex64> {
    let geom = pair_geometry(p, q, same);
    let sin_p = guarded_sin(geom.h_p, k)?;
    let sin_q = guarded_sin(geom.h_q, k)?;
    let rmin = rho_min(k);
    if geom.rho <= rmin {
        return Err(Error::DegenerateGeometry {
            rho: geom.rho,
            rho_min: rmin,
        });
    }
    closed_from_geometry(&geom, sin_p, sin_q, k)
}

pub(crate) fn closed_from_geometry(
    geom: &PairGeometry,
    sin_p: f64,
    sin_q: f64,
    k: f64,
) -> Result<Complex64> {
    let hp = geom.h_p;
    let hq = geom.h_q;
    let mut ends = Complex64::new(0.0, 0.0);
    let mut center = Complex64::new(0.0, 0.0);
    for s0 in [-1.0, 1.0] {
        let w = s0 * Complex64::from_polar(1.0, s0 * k * hq);
        ends += w * (kernel_i_qp(hp, s0, geom, k)? + kernel_i_qp(-hp, s0, geom, k)?);
        center += w * kernel_i_qp(0.0, s0, geom, k)?;
    }
    let c = ETA0 / (8.0 * PI * sin_p * sin_q);
    let z = c * (ends - 2.0 * (k * hp).cos() * center);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite("mutual impedance".into()))
    }
}
