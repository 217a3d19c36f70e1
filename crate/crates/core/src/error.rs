use thiserror::Error;

/// Failures surfaced by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of its interval budget.
    #[error("quadrature did not converge: estimated error {abs_error:e} after {intervals} intervals (requested relative tolerance {rel_tol:e})")]
    Convergence {
        abs_error: f64,
        intervals: usize,
        rel_tol: f64,
    },

    /// Iterative evaluation (continued fraction, series) failed to settle.
    #[error("iteration did not converge: {0}")]
    Iteration(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// Transverse separation too small for the exponential-integral closed form.
    #[error("degenerate geometry: transverse distance {rho:e} m is below the closed-form threshold {rho_min:e} m")]
    DegenerateGeometry { rho: f64, rho_min: f64 },

    /// |sin(k h)| is too small for the sinusoidal current normalization.
    #[error("resonant-length guard: |sin(k*h)| = {sin_kh:e} for half-length {half_length} m (k*h = {kh}); half-lengths near multiples of lambda/2 are rejected")]
    ResonantLength {
        half_length: f64,
        kh: f64,
        sin_kh: f64,
    },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A NaN or infinity reached a public boundary.
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    /// True for failures caused by numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Iteration(_)
                | Error::DegenerateGeometry { .. }
                | Error::ResonantLength { .. }
                | Error::SingularSystem(_)
                | Error::NonFinite(_)
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
