//! The four subcommands. Each returns the files it wrote.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use metacouple::constants::{wavenumber, DEFAULT_ORACLE_TOL};
use metacouple::{
    assemble_impedances_with_tol, build_grid, end_to_end, mutual_impedance_closed,
    mutual_impedance_oracle, optimize_tuning, ChannelResult, Dipole, ImpedanceSet, Scene,
    TuningState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ResolvedConfig, SceneConfig, SurfaceLayout, TuningPlan, ValidateConfig};
use crate::error::{CliError, Result};
use crate::output::{
    column_csv, csv_field, ensure_dir, matrix_csv, write_file, write_json, ComplexOut,
};

/// Relative closed-form vs oracle error above which `validate` fails.
pub const VALIDATE_GATE: f64 = 1e-6;

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub oracle_tol: Option<f64>,
}

impl RunOptions {
    fn dir(&self, cfg: &SceneConfig) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| cfg.output_dir().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn tol(&self, cfg: &SceneConfig) -> Result<f64> {
        let tol = self
            .oracle_tol
            .or(cfg.oracle_tol())
            .unwrap_or(DEFAULT_ORACLE_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Config(format!(
                "oracle tolerance must lie in (0, 1), got {tol}"
            )));
        }
        Ok(tol)
    }
}

fn load(path: &Path) -> Result<(SceneConfig, ResolvedConfig)> {
    let cfg = SceneConfig::load(path)?;
    let resolved = cfg.resolve()?;
    Ok((cfg, resolved))
}

#[derive(Serialize)]
struct ImpedanceReport {
    frequency_hz: f64,
    n_elements: usize,
    oracle_tol: f64,
    z_rt_re_ohm: f64,
    z_rt_im_ohm: f64,
    max_asymmetry: f64,
}

pub fn cmd_impedance(config: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let (cfg, r) = load(config)?;
    let tol = opts.tol(&cfg)?;
    let dir = opts.dir(&cfg);
    let imps = assemble_impedances_with_tol(&r.scene, tol)?;
    ensure_dir(&dir)?;
    Ok(vec![
        write_file(&dir, "z_ss.csv", &matrix_csv(&imps.z_ss))?,
        write_file(&dir, "z_rs.csv", &column_csv(&imps.z_rs))?,
        write_file(&dir, "z_st.csv", &column_csv(&imps.z_st))?,
        write_json(
            &dir,
            "impedance.json",
            &ImpedanceReport {
                frequency_hz: r.scene.frequency,
                n_elements: r.scene.len(),
                oracle_tol: tol,
                z_rt_re_ohm: imps.z_rt.re,
                z_rt_im_ohm: imps.z_rt.im,
                max_asymmetry: imps.max_asymmetry(),
            },
        )?,
    ])
}

/// Channel for one scene, optimized when the plan asks for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutcome {
    pub impedances: ImpedanceSet,
    pub tuning: TuningState,
    pub result: ChannelResult,
    /// Objective trace, present when the optimizer ran.
    pub trace: Option<Vec<f64>>,
}

pub fn evaluate_channel(
    scene: &Scene,
    plan: &TuningPlan,
    oracle_tol: f64,
) -> Result<ChannelOutcome> {
    let imps = assemble_impedances_with_tol(scene, oracle_tol)?;
    let init = plan.state_for(scene.len())?;
    match &plan.optimize {
        Some(o) => {
            let out = optimize_tuning(&imps, &init, o)?;
            Ok(ChannelOutcome {
                impedances: imps,
                tuning: out.tuning,
                result: out.result,
                trace: Some(out.trace),
            })
        }
        None => {
            let result = end_to_end(&imps, &init)?;
            Ok(ChannelOutcome {
                impedances: imps,
                tuning: init,
                result,
                trace: None,
            })
        }
    }
}

#[derive(Serialize)]
struct ChannelReport {
    h_e2e_re_ohm: f64,
    h_e2e_im_ohm: f64,
    abs_h_e2e_ohm: f64,
    gain_db: f64,
    condition_estimate: f64,
    z_rt_re_ohm: f64,
    z_rt_im_ohm: f64,
    frequency_hz: f64,
    n_elements: usize,
    optimized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimized_objective: Option<f64>,
    tuning: Vec<ComplexOut>,
}

pub fn cmd_channel(config: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let (cfg, r) = load(config)?;
    let tol = opts.tol(&cfg)?;
    let dir = opts.dir(&cfg);
    let out = evaluate_channel(&r.scene, &r.tuning, tol)?;
    ensure_dir(&dir)?;
    let h = out.result.h_e2e;
    let report = ChannelReport {
        h_e2e_re_ohm: h.re,
        h_e2e_im_ohm: h.im,
        abs_h_e2e_ohm: h.norm(),
        gain_db: out.result.gain_db,
        condition_estimate: out.result.condition_estimate,
        z_rt_re_ohm: out.impedances.z_rt.re,
        z_rt_im_ohm: out.impedances.z_rt.im,
        frequency_hz: r.scene.frequency,
        n_elements: r.scene.len(),
        optimized: out.trace.is_some(),
        optimized_objective: out.trace.as_ref().map(|_| h.norm_sqr()),
        tuning: out.tuning.entries.iter().map(|&z| z.into()).collect(),
    };
    let mut files = vec![write_json(&dir, "channel.json", &report)?];
    if let Some(trace) = &out.trace {
        files.push(write_file(
            &dir,
            "tuning.csv",
            &column_csv(&out.tuning.entries),
        )?);
        let mut text = String::from("sweep,objective\n");
        for (i, v) in trace.iter().enumerate() {
            let _ = writeln!(text, "{i},{v}");
        }
        files.push(write_file(&dir, "trace.csv", &text)?);
    }
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Grid spacing at fixed aperture, in the config's length units.
    Spacing,
    /// Operating frequency in Hz with the geometry held fixed in meters.
    Frequency,
    /// Grid columns set to round(value / rows).
    NElements,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Spacing => "spacing",
            SweepParam::Frequency => "frequency",
            SweepParam::NElements => "n_elements",
        }
    }
}

/// One sweep row. `outcome` holds the error message on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub n_elements: Option<usize>,
    pub outcome: std::result::Result<(ChannelResult, bool), String>,
}

/// Sweep values, evenly spaced and inclusive of both ends.
pub fn sweep_values(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::Config("sweep range must be finite".into()));
    }
    if points == 1 {
        if from != to {
            return Err(CliError::Config(
                "a single-point sweep needs --from equal to --to".into(),
            ));
        }
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                to
            } else {
                from + i as f64 * step
            }
        })
        .collect())
}

/// Scene at one sweep point.
pub fn sweep_scene(
    cfg: &SceneConfig,
    base: &ResolvedConfig,
    param: SweepParam,
    value: f64,
) -> Result<Scene> {
    let scale = if cfg.lambda_units {
        cfg.wavelength()
    } else {
        1.0
    };
    let scene = &base.scene;
    let surface = match param {
        SweepParam::Frequency => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Config(format!(
                    "frequency must be positive, got {value}"
                )));
            }
            return Ok(Scene::new(
                scene.transmitter,
                scene.receiver,
                scene.surface.clone(),
                value,
            )?);
        }
        SweepParam::Spacing => {
            let SurfaceLayout::Grid(spec) = &base.layout else {
                return Err(CliError::Config(
                    "spacing sweeps need a grid surface".into(),
                ));
            };
            let s = value * scale;
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Config(format!(
                    "spacing must be positive, got {value}"
                )));
            }
            let count = |n: usize| {
                let aperture = (n - 1) as f64 * spec.spacing;
                (aperture / s + 1e-9).floor() as usize + 1
            };
            let mut g = *spec;
            g.rows = count(spec.rows);
            g.cols = count(spec.cols);
            g.spacing = s;
            build_grid(&g)?
        }
        SweepParam::NElements => {
            let SurfaceLayout::Grid(spec) = &base.layout else {
                return Err(CliError::Config(
                    "n_elements sweeps need a grid surface".into(),
                ));
            };
            if !(value >= 1.0 && value.is_finite()) {
                return Err(CliError::Config(format!(
                    "n_elements must be at least 1, got {value}"
                )));
            }
            let mut g = *spec;
            g.cols = ((value / g.rows as f64).round() as usize).max(1);
            build_grid(&g)?
        }
    };
    Ok(Scene::new(
        scene.transmitter,
        scene.receiver,
        surface,
        scene.frequency,
    )?)
}

pub fn run_sweep(
    cfg: &SceneConfig,
    base: &ResolvedConfig,
    param: SweepParam,
    values: &[f64],
    oracle_tol: f64,
) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| {
            let scene = sweep_scene(cfg, base, param, value);
            let n_elements = scene.as_ref().ok().map(Scene::len);
            let outcome = scene
                .and_then(|s| evaluate_channel(&s, &base.tuning, oracle_tol))
                .map(|o| (o.result, o.trace.is_some()))
                .map_err(|e| e.to_string());
            SweepRow {
                value,
                n_elements,
                outcome,
            }
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "value,n_elements,status,h_e2e_re_ohm,h_e2e_im_ohm,abs_h_e2e_ohm,gain_db,condition_estimate,optimized_objective";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let n = row.n_elements.map(|n| n.to_string()).unwrap_or_default();
        match &row.outcome {
            Ok((r, optimized)) => {
                let h = r.h_e2e;
                let obj = if *optimized {
                    h.norm_sqr().to_string()
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{n},ok,{},{},{},{},{},{obj}",
                    row.value,
                    h.re,
                    h.im,
                    h.norm(),
                    r.gain_db,
                    r.condition_estimate
                );
            }
            Err(msg) => {
                let _ = writeln!(
                    out,
                    "{},{n},{},,,,,,",
                    row.value,
                    csv_field(&format!("error: {msg}"))
                );
            }
        }
    }
    out
}

pub fn cmd_sweep(
    config: &Path,
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
    opts: &RunOptions,
) -> Result<Vec<PathBuf>> {
    let (cfg, base) = load(config)?;
    let tol = opts.tol(&cfg)?;
    let dir = opts.dir(&cfg);
    let values = sweep_values(from, to, points)?;
    if param != SweepParam::Frequency && !matches!(base.layout, SurfaceLayout::Grid(_)) {
        return Err(CliError::Config(format!(
            "{} sweeps need a grid surface",
            param.name()
        )));
    }
    let rows = run_sweep(&cfg, &base, param, &values, tol);
    ensure_dir(&dir)?;
    Ok(vec![write_file(&dir, "sweep.csv", &sweep_csv(&rows))?])
}

/// One closed-form vs oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub frequency_hz: f64,
    pub h_p: f64,
    pub h_q: f64,
    pub radius_p: f64,
    pub radius_q: f64,
    pub rho: f64,
    pub dz: f64,
    pub closed: metacouple::Complex64,
    pub oracle: metacouple::Complex64,
    pub rel_error: f64,
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2], field: &str) -> Result<f64> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
        return Err(CliError::Config(format!(
            "validate.{field}: need min <= max, got {r:?}"
        )));
    }
    Ok(if r[0] == r[1] {
        r[0]
    } else {
        rng.gen_range(r[0]..r[1])
    })
}

/// Draw `samples` random pairs and compare the two evaluations.
pub fn run_validation(
    bounds: &ValidateConfig,
    default_frequency: f64,
    samples: usize,
    seed: u64,
    oracle_tol: f64,
) -> Result<Vec<Comparison>> {
    if samples == 0 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let freqs = bounds
        .frequencies_hz
        .clone()
        .unwrap_or_else(|| vec![default_frequency]);
    if freqs.is_empty() || freqs.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
        return Err(CliError::Config(
            "validate.frequencies_hz must be positive and non-empty".into(),
        ));
    }
    if !(bounds.dz_max >= 0.0 && bounds.dz_max.is_finite()) {
        return Err(CliError::Config(
            "validate.dz_max must be non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let f = freqs[rng.gen_range(0..freqs.len())];
        let lambda = metacouple::constants::wavelength(f);
        let h_p = uniform(&mut rng, bounds.half_length, "half_length")? * lambda;
        let h_q = uniform(&mut rng, bounds.half_length, "half_length")? * lambda;
        let a_p = uniform(&mut rng, bounds.radius, "radius")? * lambda;
        let a_q = uniform(&mut rng, bounds.radius, "radius")? * lambda;
        let rho = uniform(&mut rng, bounds.distance, "distance")? * lambda;
        let dz = uniform(&mut rng, [-bounds.dz_max, bounds.dz_max], "dz_max")? * lambda;
        let p = Dipole::new([0.0, 0.0, 0.0], h_p, a_p)
            .map_err(|e| CliError::Config(format!("validate bounds: {e}")))?;
        let q = Dipole::new([rho, 0.0, dz], h_q, a_q)
            .map_err(|e| CliError::Config(format!("validate bounds: {e}")))?;
        draws.push((f, p, q));
    }
    draws
        .par_iter()
        .map(|&(f, p, q)| {
            let k = wavenumber(f);
            let closed = mutual_impedance_closed(&p, &q, false, k)?;
            let oracle = mutual_impedance_oracle(&p, &q, false, k, oracle_tol)?;
            Ok(Comparison {
                frequency_hz: f,
                h_p: p.half_length,
                h_q: q.half_length,
                radius_p: p.radius,
                radius_q: q.radius,
                rho: q.center[0],
                dz: q.center[2],
                closed,
                oracle,
                rel_error: (closed - oracle).norm() / oracle.norm(),
            })
        })
        .collect()
}

#[derive(Serialize)]
struct ValidateReport {
    samples: usize,
    seed: u64,
    oracle_tol: f64,
    gate: f64,
    max_rel_error: f64,
    median_rel_error: f64,
    pass: bool,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Writes the report, then fails with a numerical error if the gate is exceeded.
pub fn cmd_validate(
    config: &Path,
    samples: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<PathBuf>> {
    let cfg = SceneConfig::load(config)?;
    if !(cfg.frequency_hz > 0.0 && cfg.frequency_hz.is_finite()) {
        return Err(CliError::Config(format!(
            "frequency_hz must be positive, got {}",
            cfg.frequency_hz
        )));
    }
    let tol = opts.tol(&cfg)?;
    let dir = opts.dir(&cfg);
    let bounds = cfg.validate.clone().unwrap_or_default();
    let rows = run_validation(&bounds, cfg.frequency_hz, samples, seed, tol)?;

    let mut text = String::from(
        "index,frequency_hz,h_p_m,h_q_m,radius_p_m,radius_q_m,rho_m,dz_m,closed_re_ohm,closed_im_ohm,oracle_re_ohm,oracle_im_ohm,rel_error\n",
    );
    for (i, c) in rows.iter().enumerate() {
        let _ = writeln!(
            text,
            "{i},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.frequency_hz,
            c.h_p,
            c.h_q,
            c.radius_p,
            c.radius_q,
            c.rho,
            c.dz,
            c.closed.re,
            c.closed.im,
            c.oracle.re,
            c.oracle.im,
            c.rel_error
        );
    }
    let errs: Vec<f64> = rows.iter().map(|c| c.rel_error).collect();
    let max = errs.iter().copied().fold(0.0, f64::max);
    let pass = errs.iter().all(|e| *e <= VALIDATE_GATE);
    let report = ValidateReport {
        samples,
        seed,
        oracle_tol: tol,
        gate: VALIDATE_GATE,
        max_rel_error: max,
        median_rel_error: median(&errs),
        pass,
    };
    ensure_dir(&dir)?;
    let files = vec![
        write_file(&dir, "validate.csv", &text)?,
        write_json(&dir, "validate.json", &report)?,
    ];
    if !pass {
        return Err(CliError::Numeric(format!(
            "validation failed: max relative error {max:e} exceeds gate {VALIDATE_GATE:e}"
        )));
    }
    Ok(files)
}
