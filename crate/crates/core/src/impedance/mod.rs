//! Mutual impedances between z-directed thin wires with sinusoidal currents.

mod closed;
mod oracle;

use num_complex::Complex64;
use rayon::prelude::*;

pub use closed::{
    closed_field_e, kernel_i_qp, mutual_impedance, mutual_impedance_closed,
    mutual_impedance_with_tol, notable_integral_j, rho_min, KernelIntegralArgs,
};
pub use oracle::{field_by_finite_differences, mutual_impedance_oracle, source_potential};

use crate::constants::DEFAULT_ORACLE_TOL;
use crate::error::Result;
use crate::geometry::{Dipole, Scene};
use crate::linalg::CMatrix;

/// All impedances entering the end-to-end channel, in ohms.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceSet {
    /// Receiver observing the transmitter.
    pub z_rt: Complex64,
    /// Receiver observing surface element n.
    pub z_rs: Vec<Complex64>,
    /// Surface element n observing the transmitter.
    pub z_st: Vec<Complex64>,
    /// Surface-to-surface matrix, entry (q, p) = element q observing p.
    pub z_ss: CMatrix,
}

impl ImpedanceSet {
    pub fn len(&self) -> usize {
        self.z_rs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_rs.is_empty()
    }

    /// Largest relative asymmetry |Z[q][p] - Z[p][q]| / max(1, |Z[q][p]|).
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.z_ss.dim();
        let mut worst = 0.0f64;
        for q in 0..n {
            for p in (q + 1)..n {
                let a = self.z_ss.get(q, p);
                let b = self.z_ss.get(p, q);
                worst = worst.max((a - b).norm() / a.norm().max(1.0));
            }
        }
        worst
    }
}

/// Evaluate every impedance of the scene.
///
/// Only the upper triangle of the surface matrix is computed; the lower one
/// is mirrored. Pairs run in parallel, and because each entry is computed
/// independently the result does not depend on scheduling.
pub fn assemble_impedances(scene: &Scene) -> Result<ImpedanceSet> {
    assemble_impedances_with_tol(scene, DEFAULT_ORACLE_TOL)
}

/// [`assemble_impedances`] with an explicit tolerance for coaxial pairs,
/// which go through quadrature.
pub fn assemble_impedances_with_tol(scene: &Scene, oracle_tol: f64) -> Result<ImpedanceSet> {
    scene.validate()?;
    let zm = |p: &Dipole, q: &Dipole, same: bool, k: f64| {
        mutual_impedance_with_tol(p, q, same, k, oracle_tol)
    };
    let k = scene.wavenumber();
    let surf = &scene.surface;
    let n = surf.len();
    let tx = &scene.transmitter;
    let rx = &scene.receiver;

    let z_rt = zm(tx, rx, false, k)?;
    let z_rs = surf
        .par_iter()
        .map(|s| zm(s, rx, false, k))
        .collect::<Result<Vec<_>>>()?;
    let z_st = surf
        .par_iter()
        .map(|s| zm(tx, s, false, k))
        .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|q| (q..n).map(move |p| (q, p))).collect();
    let upper = pairs
        .par_iter()
        .map(|&(q, p)| zm(&surf[p], &surf[q], p == q, k))
        .collect::<Result<Vec<_>>>()?;

    let mut z_ss = CMatrix::zeros(n);
    for (&(q, p), z) in pairs.iter().zip(upper) {
        z_ss.set(q, p, z);
        z_ss.set(p, q, z);
    }

    Ok(ImpedanceSet {
        z_rt,
        z_rs,
        z_st,
        z_ss,
    })
}

/// Sequential assembly of the full matrix without mirroring; reference for
/// the reciprocity and scheduling checks.
pub fn assemble_impedances_full(scene: &Scene) -> Result<ImpedanceSet> {
    scene.validate()?;
    let k = scene.wavenumber();
    let surf = &scene.surface;
    let n = surf.len();
    let tx = &scene.transmitter;
    let rx = &scene.receiver;
    let mut z_ss = CMatrix::zeros(n);
    for q in 0..n {
        for p in 0..n {
            z_ss.set(q, p, mutual_impedance(&surf[p], &surf[q], p == q, k)?);
        }
    }
    Ok(ImpedanceSet {
        z_rt: mutual_impedance(tx, rx, false, k)?,
        z_rs: surf
            .iter()
            .map(|s| mutual_impedance(s, rx, false, k))
            .collect::<Result<_>>()?,
        z_st: surf
            .iter()
            .map(|s| mutual_impedance(tx, s, false, k))
            .collect::<Result<_>>()?,
        z_ss,
    })
}
