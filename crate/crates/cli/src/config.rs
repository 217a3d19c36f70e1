//! Scene configuration files (JSON).
//!
//! Lengths are meters unless `lambda_units` is set, in which case every
//! length (centers, half-lengths, radii, grid spacing) is a multiple of the
//! free-space wavelength at `frequency_hz` and is converted at parse time.

use std::path::Path;

use metacouple::channel::DEFAULT_REACTANCE_BOUNDS;
use metacouple::constants::wavelength;
use metacouple::{
    build_grid, Complex64, Dipole, GridPlane, GridSpec, OptimizeOptions, Scene, TuningState,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub frequency_hz: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub lambda_units: bool,
    pub transmitter: DipoleConfig,
    pub receiver: DipoleConfig,
    pub surface: SurfaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning: Option<TuningConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateConfig>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    pub center: [f64; 3],
    pub half_length: f64,
    pub radius: f64,
}

/// Exactly one of `dipoles` and `grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipoles: Option<Vec<DipoleConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneConfig {
    #[default]
    Xy,
    Xz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub half_length: f64,
    pub radius: f64,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default)]
    pub plane: PlaneConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexConfig {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexConfig> for Complex64 {
    fn from(c: ComplexConfig) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Load impedances: fixed `entries` (one per element) or a `uniform` value,
/// optionally followed by an `optimize` run starting from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<ComplexConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<ComplexConfig>,
    #[serde(default = "default_true")]
    pub reactance_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
}

fn default_budget() -> usize {
    OptimizeOptions::default().budget
}

fn default_scan_points() -> usize {
    OptimizeOptions::default().scan_points
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_tol: Option<f64>,
}

/// Sampling box for `validate`, in wavelengths (independent of `lambda_units`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    #[serde(default = "default_h_range")]
    pub half_length: [f64; 2],
    #[serde(default = "default_radius_range")]
    pub radius: [f64; 2],
    #[serde(default = "default_distance_range")]
    pub distance: [f64; 2],
    #[serde(default = "default_dz_max")]
    pub dz_max: f64,
    /// Frequencies to draw from; the scene frequency when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies_hz: Option<Vec<f64>>,
}

fn default_h_range() -> [f64; 2] {
    [0.1, 0.45]
}

fn default_radius_range() -> [f64; 2] {
    [1.0 / 5000.0, 1.0 / 200.0]
}

fn default_distance_range() -> [f64; 2] {
    [0.05, 5.0]
}

fn default_dz_max() -> f64 {
    2.0
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            half_length: default_h_range(),
            radius: default_radius_range(),
            distance: default_distance_range(),
            dz_max: default_dz_max(),
            frequencies_hz: None,
        }
    }
}

/// A scene surface described either way, after unit conversion.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceLayout {
    Explicit(Vec<Dipole>),
    Grid(GridSpec),
}

/// Fully resolved configuration: SI units, validated geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub scene: Scene,
    pub layout: SurfaceLayout,
    pub tuning: TuningPlan,
}

/// What to load the surface with.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningPlan {
    pub initial: InitialTuning,
    pub reactance_only: bool,
    pub bounds: (f64, f64),
    pub optimize: Option<OptimizeOptions>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialTuning {
    Entries(Vec<Complex64>),
    Uniform(Complex64),
}

impl TuningPlan {
    /// Tuning state for a surface of `n` elements.
    pub fn state_for(&self, n: usize) -> metacouple::Result<TuningState> {
        let entries = match &self.initial {
            InitialTuning::Entries(e) => {
                if e.len() != n {
                    return Err(metacouple::Error::InvalidInput(format!(
                        "tuning.entries has {} values for a surface of {n} elements",
                        e.len()
                    )));
                }
                e.clone()
            }
            InitialTuning::Uniform(v) => vec![*v; n],
        };
        let t = TuningState {
            entries,
            reactance_only: self.reactance_only,
            reactance_bounds: self.bounds,
        };
        t.validate()?;
        Ok(t)
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    fn length_scale(&self) -> f64 {
        if self.lambda_units {
            self.wavelength()
        } else {
            1.0
        }
    }

    /// Convert to SI units and validate everything.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(config_err(format!(
                "frequency_hz must be positive, got {}",
                self.frequency_hz
            )));
        }
        let s = self.length_scale();
        let transmitter = resolve_dipole(&self.transmitter, s, "transmitter")?;
        let receiver = resolve_dipole(&self.receiver, s, "receiver")?;

        let layout = match (&self.surface.dipoles, &self.surface.grid) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(config_err(
                    "surface: exactly one of `dipoles` or `grid` must be given",
                ))
            }
            (Some(list), None) => SurfaceLayout::Explicit(
                list.iter()
                    .enumerate()
                    .map(|(i, d)| resolve_dipole(d, s, &format!("surface.dipoles[{i}]")))
                    .collect::<Result<_>>()?,
            ),
            (None, Some(g)) => SurfaceLayout::Grid(GridSpec {
                rows: g.rows,
                cols: g.cols,
                spacing: g.spacing * s,
                half_length: g.half_length * s,
                radius: g.radius * s,
                center: g.center.map(|c| c * s),
                plane: match g.plane {
                    PlaneConfig::Xy => GridPlane::Xy,
                    PlaneConfig::Xz => GridPlane::Xz,
                },
            }),
        };
        let surface = match &layout {
            SurfaceLayout::Explicit(d) => d.clone(),
            SurfaceLayout::Grid(spec) => {
                build_grid(spec).map_err(|e| config_err(format!("surface.grid: {e}")))?
            }
        };
        let scene = Scene::new(transmitter, receiver, surface, self.frequency_hz)
            .map_err(|e| config_err(format!("scene: {e}")))?;

        let tuning = self.resolve_tuning()?;
        // fixed entries must fit the configured surface
        if let InitialTuning::Entries(e) = &tuning.initial {
            if e.len() != scene.len() {
                return Err(config_err(format!(
                    "tuning.entries: {} values for a surface of {} elements",
                    e.len(),
                    scene.len()
                )));
            }
        }
        tuning
            .state_for(scene.len())
            .map_err(|e| config_err(format!("tuning: {e}")))?;

        Ok(ResolvedConfig {
            scene,
            layout,
            tuning,
        })
    }

    fn resolve_tuning(&self) -> Result<TuningPlan> {
        let Some(t) = &self.tuning else {
            return Ok(TuningPlan {
                initial: InitialTuning::Uniform(Complex64::new(0.0, 0.0)),
                reactance_only: true,
                bounds: DEFAULT_REACTANCE_BOUNDS,
                optimize: None,
            });
        };
        let initial = match (&t.entries, &t.uniform) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "tuning: at most one of `entries` or `uniform` may be given",
                ))
            }
            (Some(e), None) => InitialTuning::Entries(e.iter().map(|&c| c.into()).collect()),
            (None, Some(u)) => InitialTuning::Uniform((*u).into()),
            (None, None) if t.optimize.is_some() => {
                InitialTuning::Uniform(Complex64::new(0.0, 0.0))
            }
            (None, None) => {
                return Err(config_err(
                    "tuning: one of `entries`, `uniform` or `optimize` must be given",
                ))
            }
        };
        let bounds = match t.bounds {
            Some([lo, hi]) => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(config_err(format!(
                        "tuning.bounds must satisfy min < max, got [{lo}, {hi}]"
                    )));
                }
                (lo, hi)
            }
            None => DEFAULT_REACTANCE_BOUNDS,
        };
        let optimize = match t.optimize {
            Some(o) => {
                if o.budget == 0 {
                    return Err(config_err("tuning.optimize.budget must be at least 1"));
                }
                if o.scan_points < 3 {
                    return Err(config_err("tuning.optimize.scan_points must be at least 3"));
                }
                Some(OptimizeOptions {
                    budget: o.budget,
                    seed: o.seed,
                    scan_points: o.scan_points,
                    ..OptimizeOptions::default()
                })
            }
            None => None,
        };
        Ok(TuningPlan {
            initial,
            reactance_only: t.reactance_only,
            bounds,
            optimize,
        })
    }

    pub fn oracle_tol(&self) -> Option<f64> {
        self.output.as_ref().and_then(|o| o.oracle_tol)
    }

    pub fn output_dir(&self) -> Option<&str> {
        self.output.as_ref().and_then(|o| o.dir.as_deref())
    }
}

fn resolve_dipole(d: &DipoleConfig, scale: f64, field: &str) -> Result<Dipole> {
    Dipole::new(
        d.center.map(|c| c * scale),
        d.half_length * scale,
        d.radius * scale,
    )
    .map_err(|e| config_err(format!("{field}: {e}")))
}
