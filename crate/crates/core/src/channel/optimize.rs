//! Cyclic coordinate ascent of |h_e2e|^2 over the load reactances.
//!
//! Each coordinate is swept on a uniform grid over the reactance bounds and
//! refined by golden-section search around the best grid point. Along one
//! coordinate the loaded matrix changes by a rank-one term, so the channel is
//! a Moebius function of the load:
//!
//! ```text
//! h(delta) = h0 + delta * v_n * u_n / (1 + delta * G_nn)
//! ```
//!
//! with u = A^-1 z_ST, v = A^-T z_RS and G_nn = (A^-1)_nn. Candidates are
//! re-evaluated from scratch before acceptance, so the objective trace never
//! decreases.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{end_to_end_with_cap, solve_loaded, ChannelResult, TuningState, DEFAULT_CONDITION_CAP};
use crate::error::{Error, Result};
use crate::impedance::ImpedanceSet;

/// What the optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// |h_e2e|^2.
    #[default]
    MaxGain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub objective: Objective,
    /// Number of full sweeps over all coordinates; must be at least 1.
    pub budget: usize,
    /// Seeds the coordinate visiting order.
    pub seed: u64,
    /// Grid points per coordinate sweep.
    pub scan_points: usize,
    pub condition_cap: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            objective: Objective::MaxGain,
            budget: 20,
            seed: 0,
            scan_points: 401,
            condition_cap: DEFAULT_CONDITION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub tuning: TuningState,
    pub result: ChannelResult,
    /// Objective after initialization and after every sweep.
    pub trace: Vec<f64>,
}

fn objective(r: &ChannelResult) -> f64 {
    r.h_e2e.norm_sqr()
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Closed-form channel as a function of the reactance of one load, built
/// from the factorization of the current loaded matrix.
struct Rank1Line {
    h0: Complex64,
    vu: Complex64,
    g_nn: Complex64,
    x_now: f64,
}

impl Rank1Line {
    fn new(imps: &ImpedanceSet, loads: &[Complex64], n: usize, cap: f64) -> Result<Self> {
        let (lu, u) = solve_loaded(imps, loads, cap)?;
        let v = lu.solve_transpose(&imps.z_rs);
        let mut e = vec![Complex64::new(0.0, 0.0); loads.len()];
        e[n] = Complex64::new(1.0, 0.0);
        let g = lu.solve(&e);
        let h0 = imps.z_rt
            - imps
                .z_rs
                .iter()
                .zip(&u)
                .map(|(a, b)| a * b)
                .sum::<Complex64>();
        Ok(Rank1Line {
            h0,
            vu: v[n] * u[n],
            g_nn: g[n],
            x_now: loads[n].im,
        })
    }

    fn channel(&self, x: f64) -> Complex64 {
        let delta = Complex64::new(0.0, x - self.x_now);
        self.h0 + delta * self.vu / (1.0 + delta * self.g_nn)
    }

    fn objective(&self, x: f64) -> f64 {
        let v = self.channel(x).norm_sqr();
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Channel for load reactance `x` on coordinate `n` via the rank-one update.
/// Exposed for consistency checks against a from-scratch solve.
pub fn rank_one_channel(
    imps: &ImpedanceSet,
    tuning: &TuningState,
    n: usize,
    x: f64,
) -> Result<Complex64> {
    Ok(Rank1Line::new(imps, &tuning.entries, n, DEFAULT_CONDITION_CAP)?.channel(x))
}

fn best_on_line<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let grid = |i: usize| {
        if i == points - 1 {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let (mut best_i, mut best_f) = (0, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(grid(i));
        if v > best_f {
            best_i = i;
            best_f = v;
        }
    }
    let a = grid(best_i.saturating_sub(1));
    let b = grid((best_i + 1).min(points - 1));
    let (x, fx) = golden_max(&f, a, b, 1e-10 * (hi - lo));
    if fx > best_f {
        (x, fx)
    } else {
        (grid(best_i), best_f)
    }
}

/// Maximize the objective over the load reactances, starting at `init`.
///
/// Only the reactive part of each load moves; resistive parts of a general
/// state are kept. The returned state is never worse than `init`.
pub fn optimize_tuning(
    imps: &ImpedanceSet,
    init: &TuningState,
    opts: &OptimizeOptions,
) -> Result<Optimized> {
    init.validate()?;
    if opts.budget == 0 {
        return Err(Error::InvalidInput(
            "optimizer budget must be at least 1".into(),
        ));
    }
    let n = imps.len();
    if init.len() != n {
        return Err(Error::InvalidInput(format!(
            "tuning has {} entries for a surface of {n} elements",
            init.len()
        )));
    }
    let cap = opts.condition_cap;
    let (lo, hi) = init.reactance_bounds;

    let mut state = init.clone();
    let mut current = end_to_end_with_cap(imps, &state, cap).ok();
    let mut trace = vec![current.as_ref().map(objective).unwrap_or(f64::NEG_INFINITY)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..opts.budget {
        order.shuffle(&mut rng);
        for &idx in &order {
            let candidate_x = match Rank1Line::new(imps, &state.entries, idx, cap) {
                Ok(line) => best_on_line(|x| line.objective(x), lo, hi, opts.scan_points).0,
                Err(_) => {
                    // current point unusable; probe the line with full solves
                    let probe = |x: f64| {
                        let mut t = state.clone();
                        t.entries[idx].im = x;
                        end_to_end_with_cap(imps, &t, cap)
                            .map(|r| objective(&r))
                            .unwrap_or(f64::NEG_INFINITY)
                    };
                    best_on_line(probe, lo, hi, opts.scan_points).0
                }
            };
            let mut trial = state.clone();
            trial.entries[idx].im = candidate_x.clamp(lo, hi);
            if let Ok(r) = end_to_end_with_cap(imps, &trial, cap) {
                let better = match &current {
                    Some(c) => objective(&r) > objective(c),
                    None => true,
                };
                if better {
                    state = trial;
                    current = Some(r);
                }
            }
        }
        let obj = current.as_ref().map(objective).unwrap_or(f64::NEG_INFINITY);
        let stalled = trace.last().is_some_and(|&last| obj <= last);
        trace.push(obj);
        if stalled {
            break;
        }
    }

    let result = current.ok_or_else(|| {
        Error::SingularSystem("every probed tuning state was singular or ill-conditioned".into())
    })?;
    Ok(Optimized {
        tuning: state,
        result,
        trace,
    })
}
