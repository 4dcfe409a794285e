//! End-to-end tests of the `qes` binary: every subcommand, the documented
//! closed-form examples, exit codes, and output determinism.

use num_complex::Complex64;
use std::process::{Command, Output};

fn qes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Union-section energies `(re, im, multiplicity)` of a spectrum CSV.
fn union_lines(csv: &str) -> Vec<(f64, f64, usize)> {
    csv.lines()
        .filter(|l| l.starts_with("union,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[3].parse().expect("re"),
                f[4].parse().expect("im"),
                f[5].parse().expect("multiplicity"),
            )
        })
        .collect()
}

#[test]
fn spectrum_reproduces_the_type_i_closed_form_triple() {
    let out = qes(&["spectrum", "-f", "I", "-A", "1", "-B", "3/2", "-m", "0.02"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let union = union_lines(&stdout(&out));
    assert_eq!(union.len(), 3, "three distinct edges");
    let want = [0.2087065, 0.7512935, 0.96];
    for ((re, im, _), w) in union.iter().zip(want) {
        assert!((re - w).abs() < 1e-6, "edge {re} vs {w}");
        assert_eq!(*im, 0.0);
    }
}

#[test]
fn spectrum_reproduces_the_type_iii_single_edge() {
    let out = qes(&["spectrum", "-f", "III", "-A", "0", "-B", "1", "-m", "0.75"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let union = union_lines(&stdout(&out));
    assert_eq!(union.len(), 1);
    assert!((union[0].0 - (-0.25)).abs() < 1e-12);
    assert_eq!(union[0].1, 0.0);
}

#[test]
fn spectrum_rejects_couplings_with_no_algebraization() {
    let out = qes(&["spectrum", "-f", "I", "-A", "0.3", "-B", "2/5", "-m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("no admissible algebraization"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn decimal_couplings_snap_to_rationals_with_a_warning() {
    let out = qes(&["spectrum", "-f", "I", "-A", "0.5", "-B", "1", "-m", "0.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("snapped"), "{}", stderr(&out));
    assert!(stdout(&out).contains("A=1/2"));
}

#[test]
fn poly_reports_tables_critical_polynomial_and_mismatch_log() {
    let out = qes(&[
        "poly", "-f", "I", "-A", "1", "-B", "3/2", "-m", "0.5", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");

    // The mismatch log is part of the schema even when empty.
    assert!(v["mismatch_log"].is_array());

    // Sector 1.1 has n = 1: rho runs j = 0..=2 with both ends exactly zero.
    let rows = v["rows"].as_array().expect("rows");
    let r11 = rows.iter().find(|r| r["row"] == "1.1").expect("sector 1.1");
    assert_eq!(r11["n"], 1);
    let rho = r11["rho"].as_array().expect("rho");
    assert_eq!(rho.len(), 3);
    assert_eq!(rho[0], serde_json::json!([0.0, 0.0]));
    assert_eq!(rho[2], serde_json::json!([0.0, 0.0]));

    // Sector 1.2 has n = 0: the critical polynomial is E - lambda_0.
    let r12 = rows.iter().find(|r| r["row"] == "1.2").expect("sector 1.2");
    assert_eq!(r12["n"], 0);
    let cp = r12["critical_polynomial"].as_array().expect("coeffs");
    assert_eq!(cp.len(), 2);
    assert_eq!(cp[1], serde_json::json!([1.0, 0.0]));
    let l0 = r12["lambda"][0].as_array().expect("lambda_0");
    let c0 = cp[0].as_array().expect("constant coefficient");
    for k in 0..2 {
        let got = c0[k].as_f64().unwrap();
        let want = -l0[k].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}

#[test]
fn wavefunction_matches_the_printed_ground_state_shape() {
    let out = qes(&[
        "wavefunction",
        "-f",
        "I",
        "-A",
        "0",
        "-B",
        "1/2",
        "-m",
        "0.5",
        "--level",
        "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);

    // Header carries the residual, measured on the uniform audit window.
    let header = text
        .lines()
        .find(|l| l.contains("residual="))
        .expect("residual in header");
    let residual: f64 = header
        .split("residual=")
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .expect("residual value");
    assert!(residual <= 1e-5, "residual {residual}");

    // The sampled column is proportional to sqrt(sn/(1+cn)).
    let mut values = Vec::new();
    let mut reference = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with('x')) {
        let f: Vec<&str> = line.split(',').collect();
        let x: f64 = f[0].parse().unwrap();
        let re: f64 = f[1].parse().unwrap();
        let im: f64 = f[2].parse().unwrap();
        values.push(Complex64::new(re, im));
        let t = qes_core::elliptic::jacobi_elliptic(x, 0.5).unwrap();
        reference.push(Complex64::new((t.sn / (1.0 + t.cn)).sqrt(), 0.0));
    }
    assert!(values.len() > 1000);
    let (_, dev) = qes_core::wavefunction::fit_constant(&values, &reference);
    assert!(dev < 1e-6, "shape deviation {dev}");
}

#[test]
fn wavefunction_rejects_an_out_of_range_level() {
    let out = qes(&[
        "wavefunction",
        "-f",
        "I",
        "-A",
        "0",
        "-B",
        "1/2",
        "-m",
        "0.5",
        "--level",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of range"), "{}", stderr(&out));
}

#[test]
fn limit_scan_converges_toward_the_unit_modulus_well() {
    let out = qes(&["limit", "k1", "-f", "II", "-A", "3/2", "-B", "-2", "-m", "0.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let data: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('m'))
        .map(|l| l.split(',').collect())
        .collect();
    assert!(!data.is_empty());
    let final_m = data.last().unwrap()[0];
    let final_gaps: Vec<f64> = data
        .iter()
        .filter(|f| f[0] == final_m)
        .map(|f| f[5].parse().unwrap())
        .collect();
    assert!(final_gaps.iter().all(|g| *g < 1e-4), "{final_gaps:?}");
}

#[test]
fn limit_toward_zero_modulus_recovers_the_trigonometric_levels() {
    let out = qes(&["limit", "k0", "-f", "I", "-A", "1/2", "-B", "2", "-m", "0.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    // The comparison level for A = 1/2, r = 0 sits at (A - r)^2 = 1/4.
    let last = text.lines().last().expect("data rows");
    let f: Vec<&str> = last.split(',').collect();
    let e_es: f64 = f[4].parse().unwrap();
    let gap: f64 = f[5].parse().unwrap();
    assert!((e_es - 0.25).abs() < 1e-12);
    assert!(gap < 1e-4);
}

#[test]
fn free_particle_limit_exits_with_a_constraint_error() {
    let out = qes(&["limit", "k0", "-f", "III", "-A", "1", "-B", "1/10", "-m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("free particle limit"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn verify_rejects_an_undersized_oracle_grid() {
    let out = qes(&["verify", "--grid-n", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("100"), "{}", stderr(&out));
}

#[test]
fn identical_configurations_give_byte_identical_output() {
    let args = [
        "spectrum", "-f", "III", "-A", "1", "-B", "1/10", "-m", "0.9", "--format", "json",
    ];
    let first = qes(&args);
    let second = qes(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let args_csv = ["poly", "-f", "II", "-A", "5/2", "-B", "-1", "-m", "0.3"];
    let first = qes(&args_csv);
    let second = qes(&args_csv);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn config_file_drives_a_run_and_out_writes_a_file() {
    let dir = std::env::temp_dir().join("qes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("run.json");
    let out_path = dir.join("spectrum.csv");
    std::fs::write(
        &config_path,
        r#"{ "model": { "family": "I", "A": "1", "B": "3/2", "m": 0.02 } }"#,
    )
    .unwrap();

    let out = qes(&[
        "spectrum",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty(), "report goes to the file");

    let text = std::fs::read_to_string(&out_path).unwrap();
    let union = union_lines(&text);
    assert_eq!(union.len(), 3);
    assert!((union[2].0 - 0.96).abs() < 1e-9);

    // Flags override the file: a different modulus moves the edges.
    let out = qes(&[
        "spectrum",
        "--config",
        config_path.to_str().unwrap(),
        "-m",
        "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("m=5e-1"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = std::env::temp_dir().join("qes-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, r#"{ "model": { "family": "I" } }"#).unwrap();
    let out = qes(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn a_closed_output_pipe_is_not_an_error() {
    // `qes ... | head` closes stdout early; the binary must stop quietly
    // instead of panicking on the broken pipe.
    let mut child = Command::new(env!("CARGO_BIN_EXE_qes"))
        .args([
            "wavefunction",
            "-f",
            "III",
            "-A",
            "1",
            "-B",
            "1/10",
            "-m",
            "0.9",
            "--grid-n",
            "20001",
        ])
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .expect("binary spawns");
    drop(child.stdout.take());
    let out = child.wait_with_output().expect("binary exits");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).is_empty(), "{}", stderr(&out));
}
