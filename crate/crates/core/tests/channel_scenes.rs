use metacouple::channel::{end_to_end_with_cap, DEFAULT_REACTANCE_BOUNDS};
use metacouple::constants::SPEED_OF_LIGHT;
use metacouple::{
    assemble_impedances, build_grid, end_to_end, optimize_tuning, Complex64, Dipole, GridPlane,
    GridSpec, ImpedanceSet, OptimizeOptions, Scene, TuningState,
};

const LAMBDA: f64 = 1.0;

fn wire(center: [f64; 3]) -> Dipole {
    Dipole::new(center, 0.25 * LAMBDA, LAMBDA / 2000.0).unwrap()
}

fn scene(surface: Vec<Dipole>) -> Scene {
    Scene::new(
        wire([-2.0, 3.0, 0.0]),
        wire([2.0, 3.0, 0.0]),
        surface,
        SPEED_OF_LIGHT / LAMBDA,
    )
    .unwrap()
}

fn grid(rows: usize, cols: usize, spacing: f64) -> Vec<Dipole> {
    build_grid(&GridSpec {
        rows,
        cols,
        spacing,
        half_length: 0.25 * LAMBDA,
        radius: LAMBDA / 2000.0,
        center: [0.0, 0.0, 0.0],
        plane: GridPlane::Xy,
    })
    .unwrap()
}

fn objective(imps: &ImpedanceSet, x: &[f64]) -> f64 {
    let t = TuningState::reactances(x, DEFAULT_REACTANCE_BOUNDS).unwrap();
    end_to_end(imps, &t).map(|r| r.h_e2e.norm()).unwrap_or(0.0)
}

#[test]
fn single_element_matrix_path_equals_scalar_formula() {
    let imps = assemble_impedances(&scene(grid(1, 1, 0.1))).unwrap();
    for x in [-1500.0, -42.0, 0.0, 250.0] {
        let t = TuningState::reactances(&[x], DEFAULT_REACTANCE_BOUNDS).unwrap();
        let got = end_to_end(&imps, &t).unwrap().h_e2e;
        let want = imps.z_rt
            - imps.z_rs[0] * imps.z_st[0] / (imps.z_ss.get(0, 0) + Complex64::new(0.0, x));
        assert!((got - want).norm() <= 1e-12 * want.norm());
    }
}

#[test]
fn open_circuit_surface_on_16_elements() {
    let imps = assemble_impedances(&scene(grid(4, 4, 0.125))).unwrap();
    let mut last = f64::INFINITY;
    for x in [1e6, 1e9, 1e12] {
        let t = TuningState::uniform(16, Complex64::new(0.0, x), true, (-1e13, 1e13)).unwrap();
        let r = end_to_end(&imps, &t).unwrap();
        assert!(r.gain_db.abs() < last);
        last = r.gain_db.abs();
        if x == 1e9 {
            assert!((r.h_e2e - imps.z_rt).norm() <= 1e-6 * imps.z_rt.norm());
        }
    }
}

#[test]
fn symmetric_pair_is_permutation_invariant() {
    // two elements mirrored about x = 0, TX and RX mirrored too
    let imps =
        assemble_impedances(&scene(vec![wire([-0.1, 0.0, 0.0]), wire([0.1, 0.0, 0.0])])).unwrap();
    let a = end_to_end(
        &imps,
        &TuningState::reactances(&[-300.0, 120.0], DEFAULT_REACTANCE_BOUNDS).unwrap(),
    )
    .unwrap();
    let b = end_to_end(
        &imps,
        &TuningState::reactances(&[120.0, -300.0], DEFAULT_REACTANCE_BOUNDS).unwrap(),
    )
    .unwrap();
    assert!((a.h_e2e.norm() - b.h_e2e.norm()).abs() <= 1e-12 * a.h_e2e.norm());
}

#[test]
fn solve_residual_on_dense_surface() {
    let imps = assemble_impedances(&scene(grid(4, 4, 0.125))).unwrap();
    let loads: Vec<Complex64> = (0..16)
        .map(|i| Complex64::new(0.0, -400.0 + 50.0 * i as f64))
        .collect();
    let a = imps.z_ss.plus_diagonal(&loads).unwrap();
    let lu = metacouple::linalg::Lu::factor(&a).unwrap();
    let x = lu.solve(&imps.z_st);
    let r: f64 = a
        .mul_vec(&x)
        .iter()
        .zip(&imps.z_st)
        .map(|(u, v)| (u - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let b: f64 = imps.z_st.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!(r <= 1e-10 * b);
    let t = TuningState::general(loads, DEFAULT_REACTANCE_BOUNDS).unwrap();
    assert!(end_to_end_with_cap(&imps, &t, 1.0).is_err());
}

#[test]
fn optimizer_beats_fine_grid_for_one_element() {
    let imps = assemble_impedances(&scene(grid(1, 1, 0.1))).unwrap();
    let (lo, hi) = (-1000.0, 1000.0);
    let init = TuningState::reactances(&[0.0], (lo, hi)).unwrap();
    let out = optimize_tuning(&imps, &init, &OptimizeOptions::default()).unwrap();
    // brute force at 1e-3 ohm resolution with the scalar formula
    let steps = ((hi - lo) / 1e-3) as usize;
    let mut best = 0.0f64;
    for i in 0..=steps {
        let x = lo + i as f64 * 1e-3;
        let h = imps.z_rt
            - imps.z_rs[0] * imps.z_st[0] / (imps.z_ss.get(0, 0) + Complex64::new(0.0, x));
        best = best.max(h.norm());
    }
    let got = out.result.h_e2e.norm();
    assert!(got >= best * (1.0 - 1e-9), "{got} vs grid {best}");
}

#[test]
fn optimizer_matches_2d_grid_for_symmetric_pair() {
    let imps =
        assemble_impedances(&scene(vec![wire([-0.1, 0.0, 0.0]), wire([0.1, 0.0, 0.0])])).unwrap();
    let (lo, hi) = DEFAULT_REACTANCE_BOUNDS;
    let init = TuningState::reactances(&[0.0, 0.0], (lo, hi)).unwrap();
    let out = optimize_tuning(&imps, &init, &OptimizeOptions::default()).unwrap();
    let n = 201;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            best = best.max(objective(
                &imps,
                &[lo + i as f64 * step, lo + j as f64 * step],
            ));
        }
    }
    let got = out.result.h_e2e.norm();
    assert!(got >= best * (1.0 - 1e-3), "{got} vs grid {best}");
    assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
}
