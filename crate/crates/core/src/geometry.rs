//! Dipoles, scenes and the pairwise quantities fed to the impedance kernels.
//!
//! Every wire is parallel to the z axis, so a dipole is fully described by its
//! center, half-length and radius.

use crate::constants::{wavelength, wavenumber};
use crate::error::{Error, Result};

/// A z-directed thin-wire dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    /// Center (x, y, z), meters.
    pub center: [f64; 3],
    /// Half-length h, meters.
    pub half_length: f64,
    /// Wire radius a, meters.
    pub radius: f64,
}

impl Dipole {
    /// Validated constructor. The radius must stay below a tenth of the
    /// half-length for the sinusoidal-current model to apply.
    pub fn new(center: [f64; 3], half_length: f64, radius: f64) -> Result<Self> {
        let d = Dipole {
            center,
            half_length,
            radius,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Geometry(format!(
                "dipole center must be finite, got {:?}",
                self.center
            )));
        }
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::Geometry(format!(
                "half-length must be positive, got {}",
                self.half_length
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Geometry(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.radius < self.half_length / 10.0) {
            return Err(Error::Geometry(format!(
                "thin-wire guard: radius {} m must be below half_length/10 = {} m",
                self.radius,
                self.half_length / 10.0
            )));
        }
        Ok(())
    }

    /// Transverse (xy-plane) distance to another wire's axis.
    pub fn transverse_distance(&self, other: &Dipole) -> f64 {
        (self.center[0] - other.center[0]).hypot(self.center[1] - other.center[1])
    }

    /// True when the two wires share volume.
    pub fn overlaps(&self, other: &Dipole) -> bool {
        let apart = self.transverse_distance(other) > self.radius + other.radius;
        let disjoint_z =
            (self.center[2] - other.center[2]).abs() > self.half_length + other.half_length;
        !(apart || disjoint_z)
    }

    /// Copy shifted by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> Dipole {
        Dipole {
            center: [
                self.center[0] + offset[0],
                self.center[1] + offset[1],
                self.center[2] + offset[2],
            ],
            ..*self
        }
    }
}

/// Transmitter, receiver and the surface wires at one operating frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub transmitter: Dipole,
    pub receiver: Dipole,
    pub surface: Vec<Dipole>,
    /// Operating frequency, Hz.
    pub frequency: f64,
}

impl Scene {
    pub fn new(
        transmitter: Dipole,
        receiver: Dipole,
        surface: Vec<Dipole>,
        frequency: f64,
    ) -> Result<Self> {
        let scene = Scene {
            transmitter,
            receiver,
            surface,
            frequency,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Check every dipole and every pair of wires for overlap.
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::Geometry(format!(
                "frequency must be positive, got {}",
                self.frequency
            )));
        }
        if self.surface.is_empty() {
            return Err(Error::Geometry(
                "surface must hold at least one dipole".into(),
            ));
        }
        let wires: Vec<(String, &Dipole)> =
            std::iter::once(("transmitter".to_string(), &self.transmitter))
                .chain(std::iter::once(("receiver".to_string(), &self.receiver)))
                .chain(
                    self.surface
                        .iter()
                        .enumerate()
                        .map(|(i, d)| (format!("surface[{i}]"), d)),
                )
                .collect();
        for (name, d) in &wires {
            d.validate()
                .map_err(|e| Error::Geometry(format!("{name}: {e}")))?;
        }
        for i in 0..wires.len() {
            for j in (i + 1)..wires.len() {
                if wires[i].1.overlaps(wires[j].1) {
                    return Err(Error::Geometry(format!(
                        "{} and {} overlap",
                        wires[i].0, wires[j].0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.surface.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surface.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency)
    }

    pub fn wavenumber(&self) -> f64 {
        wavenumber(self.frequency)
    }

    /// Copy with every wire shifted by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> Scene {
        Scene {
            transmitter: self.transmitter.translated(offset),
            receiver: self.receiver.translated(offset),
            surface: self.surface.iter().map(|d| d.translated(offset)).collect(),
            frequency: self.frequency,
        }
    }
}

/// Plane holding a regular surface lattice. Wires are z-directed either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridPlane {
    /// Rows along y, columns along x: wires side by side.
    #[default]
    Xy,
    /// Rows along z, columns along x: wires stacked end to end.
    Xz,
}

/// Regular rows x cols lattice of identical dipoles centered on `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub half_length: f64,
    pub radius: f64,
    pub center: [f64; 3],
    pub plane: GridPlane,
}

/// Lay out the lattice row-major (index = row * cols + col).
pub fn build_grid(spec: &GridSpec) -> Result<Vec<Dipole>> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(Error::Geometry(format!(
            "grid needs at least one row and column, got {}x{}",
            spec.rows, spec.cols
        )));
    }
    if !(spec.spacing > 0.0 && spec.spacing.is_finite()) {
        return Err(Error::Geometry(format!(
            "grid spacing must be positive, got {}",
            spec.spacing
        )));
    }
    let proto = Dipole::new(spec.center, spec.half_length, spec.radius)?;

    // nearest neighbours are the only candidates for overlap
    let lateral_clash = spec.spacing <= 2.0 * spec.radius;
    if spec.cols > 1 && lateral_clash {
        return Err(Error::Geometry(format!(
            "grid spacing {} m does not clear two wire radii ({} m)",
            spec.spacing,
            2.0 * spec.radius
        )));
    }
    if spec.rows > 1 {
        match spec.plane {
            GridPlane::Xy if lateral_clash => {
                return Err(Error::Geometry(format!(
                    "grid spacing {} m does not clear two wire radii ({} m)",
                    spec.spacing,
                    2.0 * spec.radius
                )))
            }
            GridPlane::Xz if spec.spacing <= 2.0 * spec.half_length => {
                return Err(Error::Geometry(format!(
                    "z-stacked rows overlap: spacing {} m must exceed 2*half_length = {} m",
                    spec.spacing,
                    2.0 * spec.half_length
                )))
            }
            _ => {}
        }
    }

    let row_mid = (spec.rows as f64 - 1.0) / 2.0;
    let col_mid = (spec.cols as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(spec.rows * spec.cols);
    for r in 0..spec.rows {
        let v = (r as f64 - row_mid) * spec.spacing;
        for c in 0..spec.cols {
            let u = (c as f64 - col_mid) * spec.spacing;
            let offset = match spec.plane {
                GridPlane::Xy => [u, v, 0.0],
                GridPlane::Xz => [u, 0.0, v],
            };
            out.push(proto.translated(offset));
        }
    }
    Ok(out)
}

/// Geometry of the (observer q, source p) pair entering the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    /// Transverse distance, or the wire radius for a self term, meters.
    pub rho: f64,
    /// z_q - z_p, meters.
    pub dz: f64,
    /// Source half-length, meters.
    pub h_p: f64,
    /// Observer half-length, meters.
    pub h_q: f64,
}

/// Pair geometry with `p` as source and `q` as observer. For a self term
/// (`same == true`) the transverse distance is replaced by q's radius.
pub fn pair_geometry(p: &Dipole, q: &Dipole, same: bool) -> PairGeometry {
    if same {
        PairGeometry {
            rho: q.radius,
            dz: 0.0,
            h_p: p.half_length,
            h_q: q.half_length,
        }
    } else {
        PairGeometry {
            rho: q.transverse_distance(p),
            dz: q.center[2] - p.center[2],
            h_p: p.half_length,
            h_q: q.half_length,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn wire(center: [f64; 3]) -> Dipole {
        Dipole::new(center, 0.25, 0.001).unwrap()
    }

    fn grid(rows: usize, cols: usize, spacing: f64) -> GridSpec {
        GridSpec {
            rows,
            cols,
            spacing,
            half_length: 0.25,
            radius: 0.0005,
            center: [0.0, 0.0, 0.0],
            plane: GridPlane::Xy,
        }
    }

    #[test]
    fn dipole_guards() {
        assert!(Dipole::new([0.0; 3], 0.0, 1e-3).is_err());
        assert!(Dipole::new([0.0; 3], 0.25, 0.0).is_err());
        assert!(Dipole::new([0.0; 3], 0.25, 0.025).is_err());
        assert!(Dipole::new([0.0; 3], 0.25, 0.0249).is_ok());
        assert!(Dipole::new([f64::NAN, 0.0, 0.0], 0.25, 0.001).is_err());
    }

    #[test]
    fn self_pair() {
        let d = wire([1.0, 2.0, 3.0]);
        let g = pair_geometry(&d, &d, true);
        assert_eq!(g.rho, 0.001);
        assert_eq!(g.dz, 0.0);
    }

    #[test]
    fn pythagorean_pair() {
        let p = wire([0.0, 0.0, 0.0]);
        let q = wire([0.3, 0.4, 0.2]);
        let g = pair_geometry(&p, &q, false);
        assert_relative_eq!(g.rho, 0.5, max_relative = 1e-15);
        assert_relative_eq!(g.dz, 0.2);
        assert_relative_eq!(pair_geometry(&q, &p, false).dz, -0.2);
    }

    #[test]
    fn coaxial_pair() {
        let g = pair_geometry(&wire([0.0; 3]), &wire([0.0, 0.0, 1.0]), false);
        assert_eq!(g.rho, 0.0);
        assert_eq!(g.dz, 1.0);
    }

    #[test]
    fn grid_1x2_half_wave() {
        let lambda = 1.0;
        let g = build_grid(&grid(1, 2, lambda / 2.0)).unwrap();
        assert_eq!(g.len(), 2);
        let pg = pair_geometry(&g[0], &g[1], false);
        assert_relative_eq!(pg.rho, 0.5);
        assert_eq!(pg.dz, 0.0);
    }

    #[test]
    fn grid_2x2_distances() {
        let s = 1.0 / 8.0;
        let g = build_grid(&grid(2, 2, s)).unwrap();
        assert_eq!(g.len(), 4);
        let mut ds = vec![];
        for i in 0..4 {
            for j in (i + 1)..4 {
                ds.push(g[i].transverse_distance(&g[j]));
            }
        }
        assert_eq!(ds.len(), 6);
        let min = ds.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ds.iter().cloned().fold(0.0, f64::max);
        assert_relative_eq!(min, s, max_relative = 1e-15);
        assert_relative_eq!(max, s * 2f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn grid_row_major_order() {
        let g = build_grid(&grid(2, 3, 0.1)).unwrap();
        // first row first, x increasing along a row
        assert!(g[0].center[0] < g[1].center[0] && g[1].center[0] < g[2].center[0]);
        assert!(g[0].center[1] < g[3].center[1]);
        assert_eq!(g[0].center[1], g[2].center[1]);
    }

    #[test]
    fn grid_single_element() {
        let mut spec = grid(1, 1, 0.1);
        spec.center = [1.0, -2.0, 0.5];
        let g = build_grid(&spec).unwrap();
        assert_eq!(
            g,
            vec![Dipole::new([1.0, -2.0, 0.5], 0.25, 0.0005).unwrap()]
        );
    }

    #[test]
    fn grid_overlap_rejected() {
        let mut spec = grid(2, 1, 0.5);
        spec.plane = GridPlane::Xz;
        assert!(matches!(build_grid(&spec), Err(Error::Geometry(_))));
        spec.spacing = 0.51;
        assert!(build_grid(&spec).is_ok());
        assert!(build_grid(&grid(1, 2, 0.001)).is_err());
        assert!(build_grid(&grid(0, 2, 0.1)).is_err());
    }

    #[test]
    fn scene_overlap_rejected() {
        let tx = wire([-5.0, 0.0, 0.0]);
        let rx = wire([5.0, 0.0, 0.0]);
        let surf = vec![wire([0.0, 0.0, 0.0]), wire([0.0015, 0.0, 0.1])];
        assert!(Scene::new(tx, rx, surf, 3e8).is_err());
        let surf = vec![wire([0.0, 0.0, 0.0]), wire([0.0, 0.0, 0.6])];
        assert!(Scene::new(tx, rx, surf, 3e8).is_ok());
        assert!(Scene::new(tx, rx, vec![], 3e8).is_err());
        assert!(Scene::new(tx, rx, vec![wire([0.0; 3])], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn pair_geometry_is_antisymmetric_in_dz(
            x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64,
        ) {
            let p = wire([0.1, -0.2, 0.3]);
            let q = wire([x, y, z]);
            let a = pair_geometry(&p, &q, false);
            let b = pair_geometry(&q, &p, false);
            prop_assert_eq!(a.rho, b.rho);
            prop_assert_eq!(a.dz, -b.dz);
        }

        #[test]
        fn build_grid_is_deterministic(rows in 1usize..5, cols in 1usize..5, s in 0.01..1.0f64) {
            let spec = grid(rows, cols, s);
            let a = build_grid(&spec).unwrap();
            let b = build_grid(&spec).unwrap();
            prop_assert_eq!(a.len(), rows * cols);
            for (u, v) in a.iter().zip(&b) {
                for i in 0..3 {
                    prop_assert_eq!(u.center[i].to_bits(), v.center[i].to_bits());
                }
            }
        }
    }
}
