use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qspd::io::{read_psi_table, read_samples, to_json, write_json, FitReport};
use qspd::manifold::SpdQMatrix;
use qspd::QMatrix;

fn qspd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspd")).args(args).output().expect("spawn qspd")
}

fn ok(args: &[&str]) -> String {
    let out = qspd(args);
    assert!(out.status.success(), "qspd {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit status and the single stderr line.
fn fails(args: &[&str]) -> (i32, String) {
    let out = qspd(args);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    (out.status.code().unwrap(), err)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_matrix(dir: &Path, name: &str, m: &SpdQMatrix) -> String {
    let path = dir.join(name);
    write_json(&path, m).unwrap();
    p(&path).to_string()
}

#[test]
fn distance_of_a_matrix_to_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let i = write_matrix(dir.path(), "i.json", &SpdQMatrix::identity(2));
    assert_eq!(ok(&["distance", &i, &i]).trim(), "0.0");
    let d = SpdQMatrix::real_diagonal(&[3f64.exp(), 4f64.exp()]).unwrap();
    let d = write_matrix(dir.path(), "d.json", &d);
    let v: f64 = ok(&["distance", &i, &d]).trim().parse().unwrap();
    assert!((v - 5.0).abs() < 1e-12);
}

#[test]
fn written_matrices_reparse_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    ok(&["sample", "--n", "3", "--sigma", "0.8", "--count", "20", "--seed", "1", "-o", p(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let samples = read_samples(&out).unwrap();
    assert_eq!(samples.len(), 20);
    assert_eq!(to_json(&samples) + "\n", text);

    let a = write_matrix(dir.path(), "a.json", &samples[0]);
    let b = write_matrix(dir.path(), "b.json", &samples[1]);
    let g = ok(&["geodesic", &a, &b, "--t", "-0.5"]);
    let m: QMatrix = serde_json::from_str(&g).unwrap();
    assert_eq!(to_json(&m), g.trim());
    let end: QMatrix = serde_json::from_str(&ok(&["geodesic", &a, &b, "--t", "0"])).unwrap();
    assert!((&end - samples[0].as_matrix()).frob_norm() < 1e-9 * samples[0].frob_norm());
}

#[test]
fn seeded_commands_are_byte_identical() {
    let args = ["sample", "--n", "2", "--sigma", "0.3", "--count", "50", "--seed", "12"];
    assert_eq!(ok(&args), ok(&args));
    let other = ok(&["sample", "--n", "2", "--sigma", "0.3", "--count", "50", "--seed", "13"]);
    assert_ne!(ok(&args), other);
    let tab = |workers: &str| {
        ok(&[
            "tabulate-psi", "--n", "2", "--eta-min", "-8", "--eta-max", "-0.5", "--points", "5",
            "--samples-per-eta", "1000", "--seed", "3", "--workers", workers,
        ])
    };
    assert_eq!(tab("1"), tab("5"));
}

#[test]
fn sample_then_fit_recovers_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let (samples, table, fit) = (dir.path().join("s.json"), dir.path().join("t.json"), dir.path().join("f.json"));
    ok(&["sample", "--n", "2", "--sigma", "0.5", "--count", "500", "--seed", "21", "-o", p(&samples)]);
    ok(&[
        "tabulate-psi", "--n", "2", "--eta-min", "-50", "--eta-max", "-0.5", "--points", "16",
        "--samples-per-eta", "10000", "--seed", "22", "--workers", "4", "-o", p(&table),
    ]);
    assert_eq!(read_psi_table(&table).unwrap().dim(), 2);
    ok(&["fit", "--samples", p(&samples), "--psi-table", p(&table), "-o", p(&fit)]);
    let report: FitReport = serde_json::from_str(&fs::read_to_string(&fit).unwrap()).unwrap();
    assert!((0.45..=0.55).contains(&report.sigma_hat), "{}", report.sigma_hat);
    assert!((report.eta_hat + 0.5 / report.sigma_hat.powi(2)).abs() < 1e-12);

    let bary: QMatrix = serde_json::from_str(&ok(&["barycenter", "--samples", p(&samples)])).unwrap();
    assert_eq!(bary, report.barycentre);
}

#[test]
fn scalar_samples_have_unit_log_variance() {
    let out = ok(&["sample", "--n", "1", "--sigma", "1", "--count", "20000", "--seed", "7"]);
    let samples: Vec<QMatrix> = serde_json::from_str(&out).unwrap();
    let logs: Vec<f64> = samples.iter().map(|m| m[(0, 0)].re.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let var = logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (logs.len() - 1) as f64;
    assert!((var - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn check_reports_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let d = write_matrix(dir.path(), "d.json", &SpdQMatrix::real_diagonal(&[2.0, 5.0]).unwrap());
    let report: serde_json::Value = serde_json::from_str(&ok(&["check", &d])).unwrap();
    assert_eq!(report["positive_definite"], true);
    assert_eq!(report["eigenvalues"], serde_json::json!([2.0, 5.0]));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n":2,"entries":[[[1,0,0,0],[0,0,0,0]],[[0,0,0,0],[-1,0,0,0]]]}"#).unwrap();
    let out = qspd(&["check", p(&bad)]);
    assert_eq!(out.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["hermitian"], true);
    assert_eq!(report["positive_definite"], false);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let i2 = write_matrix(dir.path(), "i2.json", &SpdQMatrix::identity(2));
    let i3 = write_matrix(dir.path(), "i3.json", &SpdQMatrix::identity(3));
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    let indefinite = dir.path().join("indef.json");
    fs::write(&indefinite, r#"{"n":1,"entries":[[[-1,0,0,0]]]}"#).unwrap();

    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["sample", "--n", "2"], 2, "usage"),
        (vec!["sample", "--n", "2", "--sigma", "-1", "--count", "3", "--seed", "1"], 2, "usage"),
        (vec!["frobnicate"], 2, "usage"),
        (vec!["distance", p(&garbage), &i2], 3, "input-format"),
        (vec!["distance", &i2, &i3], 3, "input-format"),
        (vec!["distance", &i2, "/nonexistent/x.json"], 3, "input-format"),
        (vec!["distance", p(&indefinite), p(&indefinite)], 4, "numeric"),
        (vec!["barycenter", "--samples", p(&garbage)], 3, "input-format"),
    ];
    for (args, code, tag) in cases {
        let (got, err) = fails(&args);
        assert_eq!(got, code, "{args:?}: {err}");
        assert!(err.starts_with(&format!("qspd: error[{tag}]: ")), "{err}");
    }

    // fitting far outside the table is a numeric error; a tight budget is non-convergence
    let samples = dir.path().join("s.json");
    let table = dir.path().join("t.json");
    ok(&["sample", "--n", "2", "--sigma", "1", "--count", "30", "--seed", "1", "-o", p(&samples)]);
    ok(&[
        "tabulate-psi", "--n", "2", "--eta-min", "-50", "--eta-max", "-20", "--points", "3",
        "--samples-per-eta", "500", "--seed", "1", "-o", p(&table),
    ]);
    assert_eq!(fails(&["fit", "--samples", p(&samples), "--psi-table", p(&table)]).0, 4);
    let (code, err) = fails(&["barycenter", "--samples", p(&samples), "--max-iters", "1", "--grad-tol", "1e-300"]);
    assert_eq!(code, 5, "{err}");
}
