//! End-to-end channel through the surface and tuning of the surface loads.
//!
//! ```text
//! h_e2e = z_RT - z_RS^T (Z_SS + Z_RIS)^-1 z_ST
//! ```
//!
//! with Z_RIS diagonal. The inverse is never formed; a single LU solve of
//! the loaded surface matrix against z_ST gives the surface currents.

mod optimize;

pub use optimize::{optimize_tuning, rank_one_channel, Objective, OptimizeOptions, Optimized};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::impedance::ImpedanceSet;
use crate::linalg::Lu;

/// Default reactance bounds, ohms.
pub const DEFAULT_REACTANCE_BOUNDS: (f64, f64) = (-2000.0, 2000.0);

/// Default cap on the condition estimate of Z_SS + Z_RIS.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Diagonal of Z_RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningState {
    /// Load impedances, ohms.
    pub entries: Vec<Complex64>,
    /// When set, every entry is a pure reactance inside `reactance_bounds`.
    pub reactance_only: bool,
    /// (min, max) reactance, ohms.
    pub reactance_bounds: (f64, f64),
}

impl TuningState {
    /// Pure reactances j*X_n.
    pub fn reactances(x: &[f64], bounds: (f64, f64)) -> Result<Self> {
        let t = TuningState {
            entries: x.iter().map(|&v| Complex64::new(0.0, v)).collect(),
            reactance_only: true,
            reactance_bounds: bounds,
        };
        t.validate()?;
        Ok(t)
    }

    /// Arbitrary complex loads; bounds still limit the reactive part when
    /// the optimizer adjusts it.
    pub fn general(entries: Vec<Complex64>, bounds: (f64, f64)) -> Result<Self> {
        let t = TuningState {
            entries,
            reactance_only: false,
            reactance_bounds: bounds,
        };
        t.validate()?;
        Ok(t)
    }

    /// Every load equal to `value`.
    pub fn uniform(
        n: usize,
        value: Complex64,
        reactance_only: bool,
        bounds: (f64, f64),
    ) -> Result<Self> {
        let t = TuningState {
            entries: vec![value; n],
            reactance_only,
            reactance_bounds: bounds,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reactance(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.im).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.reactance_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "reactance bounds must satisfy min < max, got [{lo}, {hi}]"
            )));
        }
        for (i, z) in self.entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "tuning entry {i} is not finite: {z}"
                )));
            }
            if self.reactance_only {
                if z.re != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "tuning entry {i} has resistance {} ohm but the state is reactance-only",
                        z.re
                    )));
                }
                if z.im < lo || z.im > hi {
                    return Err(Error::InvalidInput(format!(
                        "tuning entry {i} reactance {} ohm outside [{lo}, {hi}]",
                        z.im
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Channel evaluated for one tuning state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelResult {
    /// End-to-end transfer impedance, ohms.
    pub h_e2e: Complex64,
    /// 20 log10 |h_e2e / z_RT|: gain over the direct link, dB.
    pub gain_db: f64,
    /// 1-norm condition estimate of Z_SS + Z_RIS.
    pub condition_estimate: f64,
}

/// Evaluate the channel with the default condition cap.
pub fn end_to_end(imps: &ImpedanceSet, tuning: &TuningState) -> Result<ChannelResult> {
    end_to_end_with_cap(imps, tuning, DEFAULT_CONDITION_CAP)
}

/// Evaluate the channel, rejecting systems whose condition estimate
/// exceeds `condition_cap`.
pub fn end_to_end_with_cap(
    imps: &ImpedanceSet,
    tuning: &TuningState,
    condition_cap: f64,
) -> Result<ChannelResult> {
    let (lu, currents) = solve_loaded(imps, &tuning.entries, condition_cap)?;
    let h = imps.z_rt
        - imps
            .z_rs
            .iter()
            .zip(&currents)
            .map(|(a, b)| a * b)
            .sum::<Complex64>();
    finish(imps, h, lu.condition_estimate())
}

/// LU of Z_SS + diag(loads) and the solution against z_ST.
pub(crate) fn solve_loaded(
    imps: &ImpedanceSet,
    loads: &[Complex64],
    condition_cap: f64,
) -> Result<(Lu, Vec<Complex64>)> {
    if imps.z_rs.len() != imps.z_ss.dim() || imps.z_st.len() != imps.z_ss.dim() {
        return Err(Error::InvalidInput(
            "impedance set has inconsistent dimensions".into(),
        ));
    }
    let a = imps.z_ss.plus_diagonal(loads)?;
    let lu = Lu::factor(&a)?;
    let cond = lu.condition_estimate();
    if !(cond <= condition_cap) {
        return Err(Error::SingularSystem(format!(
            "condition estimate {cond:e} exceeds cap {condition_cap:e}"
        )));
    }
    let x = lu.solve(&imps.z_st);
    Ok((lu, x))
}

fn finish(imps: &ImpedanceSet, h: Complex64, condition_estimate: f64) -> Result<ChannelResult> {
    if !(h.re.is_finite() && h.im.is_finite()) {
        return Err(Error::NonFinite("end-to-end channel".into()));
    }
    let gain_db = 20.0 * (h.norm() / imps.z_rt.norm()).log10();
    Ok(ChannelResult {
        h_e2e: h,
        gain_db,
        condition_estimate,
    })
}
