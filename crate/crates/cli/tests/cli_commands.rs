use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use metacouple::constants::SPEED_OF_LIGHT;
use metacouple::{assemble_impedances, mutual_impedance, Complex64};
use metacouple_cli::SceneConfig;
use serde_json::Value;
use tempfile::TempDir;

const FREQ: f64 = SPEED_OF_LIGHT; // lambda = 1 m

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metacouple"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn grid_config(rows: usize, cols: usize, spacing: f64, tuning: &str) -> String {
    format!(
        r#"{{
  "frequency_hz": {FREQ},
  "lambda_units": true,
  "transmitter": {{"center": [-3, 5, 0], "half_length": 0.25, "radius": 0.0005}},
  "receiver": {{"center": [4, 6, 0.3], "half_length": 0.25, "radius": 0.0005}},
  "surface": {{"grid": {{"rows": {rows}, "cols": {cols}, "spacing": {spacing}, "half_length": 0.25, "radius": 0.0005}}}}{tuning}
}}"#
    )
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn h_of(v: &Value) -> Complex64 {
    Complex64::new(
        v["h_e2e_re_ohm"].as_f64().unwrap(),
        v["h_e2e_im_ohm"].as_f64().unwrap(),
    )
}

fn out_arg(d: &TempDir, sub: &str) -> String {
    d.path().join(sub).to_string_lossy().into_owned()
}

#[test]
fn impedance_output_is_byte_identical_across_runs() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(2, 2, 0.125, ""));
    for sub in ["a", "b"] {
        let o = run(&[
            "impedance",
            cfg.to_str().unwrap(),
            "--out",
            &out_arg(&d, sub),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["z_ss.csv", "z_rs.csv", "z_st.csv", "impedance.json"] {
        let a = fs::read(d.path().join("a").join(f)).unwrap();
        let b = fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let z = fs::read_to_string(d.path().join("a/z_ss.csv")).unwrap();
    assert!(z.starts_with("row,col,re_ohm,im_ohm\n"));
    assert_eq!(z.lines().count(), 17);
}

#[test]
fn single_element_impedance_is_the_self_term() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 1, 0.1, ""));
    let o = run(&[
        "impedance",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(&d, "o"),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(d.path().join("o/z_ss.csv")).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(text.lines().count(), 2);
    let resolved = SceneConfig::load(&cfg).unwrap().resolve().unwrap();
    let s = &resolved.scene.surface[0];
    let want = mutual_impedance(s, s, true, resolved.scene.wavenumber()).unwrap();
    assert_eq!((row[2], row[3]), (want.re, want.im));
}

#[test]
fn resonant_half_wave_element_exits_two() {
    let d = TempDir::new().unwrap();
    let body = grid_config(1, 2, 0.25, "").replace(
        r#""spacing": 0.25, "half_length": 0.25"#,
        r#""spacing": 0.25, "half_length": 0.5"#,
    );
    let cfg = write_config(d.path(), "c.json", &body);
    let o = run(&[
        "impedance",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(&d, "o"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resonant-length guard"));
}

#[test]
fn config_errors_exit_one() {
    let d = TempDir::new().unwrap();
    let bad = write_config(
        d.path(),
        "bad.json",
        "{\"frequency_hz\": 1e9,\n \"bogus\": 1}",
    );
    let o = run(&["channel", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = run(&["channel", d.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_element_channel_matches_scalar_formula() {
    let d = TempDir::new().unwrap();
    let tuning = r#", "tuning": {"uniform": {"re": 0, "im": -60}}"#;
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 1, 0.1, tuning));
    let o = run(&["channel", cfg.to_str().unwrap(), "--out", &out_arg(&d, "o")]);
    assert!(o.status.success());
    let got = h_of(&json(&d.path().join("o/channel.json")));
    let imps =
        assemble_impedances(&SceneConfig::load(&cfg).unwrap().resolve().unwrap().scene).unwrap();
    let want = imps.z_rt
        - imps.z_rs[0] * imps.z_st[0] / (imps.z_ss.get(0, 0) + Complex64::new(0.0, -60.0));
    assert!((got - want).norm() <= 1e-12 * want.norm());
}

#[test]
fn open_circuit_channel_has_no_gain() {
    let d = TempDir::new().unwrap();
    let tuning = r#", "tuning": {"uniform": {"re": 0, "im": 1e9}, "bounds": [-1e10, 1e10]}"#;
    let cfg = write_config(d.path(), "c.json", &grid_config(4, 4, 0.125, tuning));
    let o = run(&["channel", cfg.to_str().unwrap(), "--out", &out_arg(&d, "o")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("o/channel.json"));
    assert!(v["gain_db"].as_f64().unwrap().abs() <= 1e-5);
}

#[test]
fn optimize_directive_emits_tuning_and_monotone_trace() {
    let d = TempDir::new().unwrap();
    let tuning = r#", "tuning": {"optimize": {"budget": 5, "seed": 1}, "bounds": [-1000, 1000]}"#;
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 1, 0.1, tuning));
    let o = run(&["channel", cfg.to_str().unwrap(), "--out", &out_arg(&d, "o")]);
    assert!(o.status.success());
    let v = json(&d.path().join("o/channel.json"));
    assert_eq!(v["optimized"], Value::Bool(true));
    let trace = fs::read_to_string(d.path().join("o/trace.csv")).unwrap();
    let vals: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(
        *vals.last().unwrap(),
        v["optimized_objective"].as_f64().unwrap()
    );

    // 1-D grid oracle over the bounds
    let imps =
        assemble_impedances(&SceneConfig::load(&cfg).unwrap().resolve().unwrap().scene).unwrap();
    let best = (0..=20_000)
        .map(|i| {
            let x = -1000.0 + 0.1 * i as f64;
            (imps.z_rt
                - imps.z_rs[0] * imps.z_st[0] / (imps.z_ss.get(0, 0) + Complex64::new(0.0, x)))
            .norm()
        })
        .fold(0.0, f64::max);
    assert!(h_of(&v).norm() >= best * (1.0 - 1e-6));
    let tuning = fs::read_to_string(d.path().join("o/tuning.csv")).unwrap();
    assert_eq!(tuning.lines().count(), 2);
}

#[test]
fn singleton_sweep_reproduces_channel() {
    let d = TempDir::new().unwrap();
    let tuning = r#", "tuning": {"uniform": {"re": 0, "im": -120}}"#;
    let cfg = write_config(d.path(), "c.json", &grid_config(2, 3, 0.5, tuning));
    let c = cfg.to_str().unwrap();
    assert!(run(&["channel", c, "--out", &out_arg(&d, "ch")])
        .status
        .success());
    let o = run(&[
        "sweep",
        c,
        "--param",
        "spacing",
        "--from",
        "0.5",
        "--to",
        "0.5",
        "--points",
        "1",
        "--out",
        &out_arg(&d, "sw"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let want = h_of(&json(&d.path().join("ch/channel.json")));
    let sweep = fs::read_to_string(d.path().join("sw/sweep.csv")).unwrap();
    let row: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "6");
    assert_eq!(row[2], "ok");
    let got = Complex64::new(row[3].parse().unwrap(), row[4].parse().unwrap());
    assert_eq!(got, want);
}

#[test]
fn sweep_records_failures_in_row() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 2, 0.25, ""));
    // quarter-wave elements become half-wave at twice the frequency
    let o = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "frequency",
        "--from",
        &(FREQ).to_string(),
        "--to",
        &(2.0 * FREQ).to_string(),
        "--points",
        "3",
        "--out",
        &out_arg(&d, "o"),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(d.path().join("o/sweep.csv")).unwrap();
    let status: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert_eq!(status[0], "ok");
    assert!(status[2].contains("resonant-length guard"), "{status:?}");
}

#[test]
fn n_elements_sweep_sets_columns() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(2, 2, 0.2, ""));
    let o = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "n_elements",
        "--from",
        "2",
        "--to",
        "8",
        "--points",
        "4",
        "--out",
        &out_arg(&d, "o"),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(d.path().join("o/sweep.csv")).unwrap();
    let n: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(n, vec!["2", "4", "6", "8"]);
}

#[test]
fn validate_is_deterministic_and_passes() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 1, 0.1, ""));
    for sub in ["a", "b"] {
        let o = run(&[
            "validate",
            cfg.to_str().unwrap(),
            "--samples",
            "50",
            "--seed",
            "9",
            "--out",
            &out_arg(&d, sub),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["validate.csv", "validate.json"] {
        assert_eq!(
            fs::read(d.path().join("a").join(f)).unwrap(),
            fs::read(d.path().join("b").join(f)).unwrap()
        );
    }
    let v = json(&d.path().join("a/validate.json"));
    assert!(v["max_rel_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn validate_single_sample_has_one_row() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &grid_config(1, 1, 0.1, ""));
    let o = run(&[
        "validate",
        cfg.to_str().unwrap(),
        "--samples",
        "1",
        "--out",
        &out_arg(&d, "o"),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(d.path().join("o/validate.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn written_config_round_trips() {
    let cfg = SceneConfig::from_json(&grid_config(
        3,
        2,
        0.2,
        r#", "tuning": {"uniform": {"re": 1, "im": -5}, "reactance_only": false}"#,
    ))
    .unwrap();
    let again = SceneConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(cfg.resolve().unwrap().scene, again.resolve().unwrap().scene);
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = SceneConfig::load(&path).unwrap();
        cfg.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 2);
}
