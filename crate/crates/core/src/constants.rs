//! Physical and numerical constants (SI).

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Intrinsic impedance of free space, ohms.
pub const ETA0: f64 = 376.730313668;

/// Below `RHO_MIN_WAVELENGTHS * lambda` the closed form is abandoned for quadrature.
pub const RHO_MIN_WAVELENGTHS: f64 = 1e-6;

/// Minimum admissible |sin(k h)| for any wire.
pub const SIN_MIN: f64 = 1e-6;

/// Default relative tolerance of the quadrature oracle.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-9;

/// Wavelength in meters for a frequency in Hz.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Free-space wavenumber k = 2 pi / lambda, rad/m.
pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength(frequency_hz)
}
