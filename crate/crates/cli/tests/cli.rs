use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gausseng::catalog::{cascaded_opos, harmonic_chain};
use gausseng::engineer::target_covariance;
use gausseng::steady::analyze;
use gausseng::Tolerances;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausseng"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn cascaded_opos_is_pure_with_expected_negativity() {
    let out = run(&[
        "analyze",
        "--catalog",
        "cascaded_opos",
        "--set",
        "kappa=6.0",
        "--set",
        "eps=4.8",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("verdict: unique pure steady state"), "{text}");
    assert!(text.contains("E([1] | [2]) = 1.0986"), "{text}");

    let out = run(&[
        "analyze",
        "--catalog",
        "cascaded_opos",
        "--set",
        "kappa=6.0",
        "--set",
        "eps=4.8",
        "--json",
    ]);
    let report = json(&out);
    let e = report["steady"]["log_negativity"]["value"]
        .as_f64()
        .unwrap();
    assert!((e - 1.0986).abs() < 1e-4, "{e}");
    assert_eq!(report["conditions_agree"], Value::Bool(true));
}

#[test]
fn unpumped_opo_relaxes_to_vacuum() {
    let out = run(&[
        "analyze",
        "--catalog",
        "single_opo",
        "--set",
        "eps=0",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let vs = matrix(&json(&out)["steady"]["covariance"]);
    assert_eq!(vs, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
}

#[test]
fn mixed_steady_state_exits_2() {
    let dir = TempDir::new().unwrap();
    // damping at rate 1 and heating at rate 1/4: V = (1/2)(1 + 1/4)/(1 - 1/4) I
    let path = write(
        &dir,
        "thermal.json",
        r#"{"n": 1, "m": 2, "G": [[0, 0], [0, 0]], "C": [[[1, 0], [0, 1]], [[0.5, 0], [0, -0.5]]]}"#,
    );
    let out = run(&["analyze", path_str(&path), "--json"]);
    assert_eq!(code(&out), 2);
    let report = json(&out);
    assert_eq!(report["pure"], Value::Bool(false));
    let vs = matrix(&report["steady"]["covariance"]);
    assert!((vs[0][0] - 5.0 / 6.0).abs() < 1e-12 && (vs[1][1] - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn marginal_drift_exits_3() {
    let out = run(&["analyze", "--catalog", "cascaded_opos", "--set", "eps=6"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("not unique"));
}

#[test]
fn asymmetric_g_names_the_entry() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "bad.json",
        r#"{"n": 1, "m": 1, "G": [[1, 0.25], [0, 1]], "C": [[[1, 0], [0, 1]]]}"#,
    );
    let out = run(&["analyze", path_str(&path)]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(
        err.contains("G[0][1]") && err.contains("symmetric"),
        "{err}"
    );
}

#[test]
fn schema_errors_report_location() {
    let dir = TempDir::new().unwrap();
    let broken = write(
        &dir,
        "broken.json",
        "{\n  \"n\": 1,\n  \"m\": 1,\n  \"G\": [[0, 0], [0, 0]],,\n}",
    );
    let out = run(&["analyze", path_str(&broken)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"n": 1, "m": 0, "G": [[0, 0], [0, 0]], "C": [], "H": 0}"#,
    );
    let out = run(&["analyze", path_str(&unknown)]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("unknown field `H`"),
        "{}",
        stderr(&out)
    );

    let shape = write(
        &dir,
        "shape.json",
        r#"{"n": 2, "m": 1, "G": [[0, 0], [0, 0]], "C": [[[1, 0], [0, 1]]]}"#,
    );
    let out = run(&["analyze", path_str(&shape)]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("G has 2 rows, expected 4"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["analyze"])), 1);
    assert_eq!(code(&run(&["analyze", "--catalog", "no_such_entry"])), 1);
    assert_eq!(
        code(&run(&[
            "analyze",
            "--catalog",
            "single_opo",
            "--set",
            "eps"
        ])),
        1
    );
    assert_eq!(code(&run(&["analyze", "--catalog", "harmonic_chain"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn exported_system_gives_identical_report() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("cascaded.json");
    let out = run(&[
        "catalog",
        "export",
        "cascaded_opos",
        "--set",
        "kappa=6",
        "--set",
        "eps=4.8",
        "-o",
        path_str(&file),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    for extra in [&[][..], &["--json"][..]] {
        let mut from_file = vec!["analyze", path_str(&file)];
        from_file.extend_from_slice(extra);
        let mut from_catalog = vec![
            "analyze",
            "--catalog",
            "cascaded_opos",
            "--set",
            "kappa=6",
            "--set",
            "eps=4.8",
        ];
        from_catalog.extend_from_slice(extra);
        assert_eq!(stdout(&run(&from_file)), stdout(&run(&from_catalog)));
    }

    // the file reproduces the in-memory analysis exactly
    let tol = Tolerances::default();
    let expected = analyze(&cascaded_opos(6.0, 4.8, -4.8).unwrap(), &tol).unwrap();
    let vs = matrix(&json(&run(&["analyze", path_str(&file), "--json"]))["steady"]["covariance"]);
    let m = expected.steady_covariance().unwrap().matrix();
    for (i, row) in vs.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert_eq!(x.to_bits(), m[(i, j)].to_bits());
        }
    }
}

#[test]
fn export_is_deterministic_and_canonical() {
    let a = stdout(&run(&[
        "catalog",
        "export",
        "harmonic_chain",
        "--set",
        "r=0.7",
    ]));
    let b = stdout(&run(&[
        "catalog",
        "export",
        "harmonic_chain",
        "--set",
        "r=0.7",
    ]));
    assert_eq!(a, b);
    assert!(
        a.starts_with("{\n  \"X\": [\n") && a.ends_with("}\n"),
        "{a}"
    );
    assert_eq!(a, fs::read_to_string(data("chain4_spec.json")).unwrap());
}

#[test]
fn engineer_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first.json");
    let out = run(&[
        "engineer",
        &data("chain4_spec.json"),
        "--purely-dissipative",
        "-o",
        path_str(&first),
    ]);
    assert_eq!(code(&out), 0);
    let second = dir.path().join("second.json");
    run(&[
        "engineer",
        &data("chain4_spec.json"),
        "--purely-dissipative",
        "-o",
        path_str(&second),
    ]);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let analyzed = run(&["analyze", path_str(&first)]);
    assert_eq!(code(&analyzed), 0);
}

#[test]
fn purely_dissipative_chain_is_local() {
    let out = run(&[
        "engineer",
        &data("chain4_spec.json"),
        "--purely-dissipative",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["rank_condition"]["rank"], 4);
    assert_eq!(report["theorem2_check"], Value::Bool(true));
    let supports: Vec<Vec<u64>> = report["locality"]["channel_supports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            s.as_array()
                .unwrap()
                .iter()
                .map(|k| k.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(
        supports,
        vec![vec![1, 2], vec![1, 2, 3], vec![2, 3, 4], vec![3, 4]]
    );
    assert_eq!(
        report["locality"]["hamiltonian_edges"],
        Value::Array(vec![])
    );
}

#[test]
fn single_channel_chain_has_ring_hamiltonian() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("ring.json");
    let out = run(&[
        "engineer",
        &data("chain4_spec.json"),
        "--params",
        &data("chain4_single_channel.json"),
        "-o",
        path_str(&sys),
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["channels"], 1);
    assert_eq!(
        report["locality"]["hamiltonian_edges"],
        serde_json::json!([[1, 2], [1, 4], [2, 3], [3, 4]])
    );

    let analyzed = run(&["analyze", path_str(&sys), "--json"]);
    assert_eq!(code(&analyzed), 0);
    let vs = matrix(&json(&analyzed)["steady"]["covariance"]);
    let tol = Tolerances::default();
    let target = target_covariance(&harmonic_chain(4, 0.7).unwrap(), &tol).unwrap();
    let dev = vs
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &x)| (i, j, x)))
        .map(|(i, j, x)| (x - target.matrix()[(i, j)]).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-8, "{dev}");
}

#[test]
fn rank_deficient_parameters_exit_4_without_output() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("never.json");
    let out = run(&[
        "engineer",
        &data("chain4_spec.json"),
        "--params",
        &data("chain4_no_hamiltonian.json"),
        "-o",
        path_str(&sys),
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("rank 1 of 4"), "{}", stdout(&out));
    assert!(!sys.exists());
}

#[test]
fn params_errors_name_the_matrix() {
    let dir = TempDir::new().unwrap();
    let params = write(
        &dir,
        "params.json",
        r#"{"P": [[[1, 0]], [[0, 0]]], "R": [[0, 1], [0, 0]], "Gamma": [[0, 0], [0, 0]]}"#,
    );
    let out = run(&[
        "engineer",
        "--catalog",
        "two_mode_squeezed",
        "--params",
        path_str(&params),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("R[0][1]"), "{}", stderr(&out));
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn vacuum_start_is_first_row() {
    let out = run(&[
        "simulate",
        "--catalog",
        "cascaded_opos",
        "--init",
        "vacuum",
        "--t-final",
        "1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header.len(), 3 + 4 + 10);
    assert_eq!(&header[..4], ["t", "fidelity", "purity", "mean_q1"]);
    assert_eq!(header[7], "V_q1_q1");
    assert_eq!(header.last().unwrap(), "V_p2_p2");
    let first = &rows[0];
    assert_eq!(first[0], 0.0);
    assert_eq!(first[2], 1.0);
    let v: &[f64] = &first[7..];
    // upper triangle of I/2, row by row
    let expected = [0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.5];
    assert_eq!(v, expected);
    assert!((rows.last().unwrap()[0] - 1.0).abs() < 1e-12);
}

#[test]
fn reference_configuration_converges() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("traj.csv");
    let out = run(&[
        "simulate",
        "--catalog",
        "cascaded_opos",
        "--init",
        "1",
        "-o",
        path_str(&path),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, rows) = csv(&fs::read_to_string(&path).unwrap());
    assert!(rows.len() <= 2000);
    let last = rows.last().unwrap();
    assert!((last[1] - 1.0).abs() < 1e-4, "final fidelity {}", last[1]);
    assert!((last[2] - 1.0).abs() < 1e-4, "final purity {}", last[2]);
}

#[test]
fn non_hurwitz_simulation_needs_force() {
    let out = run(&["simulate", "--catalog", "cascaded_opos", "--set", "eps=6"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("--force"));
    assert_eq!(out.stdout.len(), 0);

    let out = run(&[
        "simulate",
        "--catalog",
        "cascaded_opos",
        "--set",
        "eps=6",
        "--force",
    ]);
    assert_eq!(code(&out), 1, "no default grid without a decay rate");

    let out = run(&[
        "simulate",
        "--catalog",
        "cascaded_opos",
        "--set",
        "eps=6",
        "--force",
        "--t-final",
        "1",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let second = text.lines().nth(1).unwrap();
    assert_eq!(second.split(',').nth(1), Some("nan"));
}

#[test]
fn unphysical_initial_state_is_rejected() {
    let out = run(&["simulate", "--catalog", "single_opo", "--init", "0.2"]);
    assert_eq!(code(&out), 1);
    let out = run(&["simulate", "--catalog", "single_opo", "--init", "squeezed"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn catalog_lists_and_shows_entries() {
    let out = run(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "single_opo",
        "cascaded_opos",
        "cv_cluster",
        "h_graph",
        "harmonic_chain",
        "two_mode_squeezed",
    ] {
        assert!(text.contains(name), "{name} missing");
    }

    let out = run(&[
        "catalog",
        "show",
        "harmonic_chain",
        "--set",
        "n=4",
        "--set",
        "r=1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let x: Vec<Vec<f64>> = text
        .lines()
        .skip_while(|l| *l != "X =")
        .skip(1)
        .take(4)
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    let tridiagonal: Vec<Vec<f64>> = (0..4)
        .map(|i: i32| {
            (0..4)
                .map(|j: i32| if (i - j).abs() == 1 { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    assert_eq!(x, tridiagonal);

    assert_eq!(code(&run(&["catalog", "show", "no_such_entry"])), 1);
    assert_eq!(
        code(&run(&["catalog", "show", "single_opo", "--set", "gain=1"])),
        1
    );
}
