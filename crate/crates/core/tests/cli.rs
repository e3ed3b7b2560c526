//! End-to-end tests of the `swlw` binary: output schemas, replay and exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

use swlw::diagnostics::DiagnosticsRecord;
use swlw::cli::FIELDS_CSV_HEADER;

fn swlw(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_swlw")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SHORT_RUN: &str = "problem = linear_tw\nh = 0.2\nT = 0.2\nsnapshot_times = 0, 0.1, 0.2\n";

#[test]
fn run_writes_outputs_with_exact_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_RUN);
    let out = dir.path().join("out");
    let (code, stdout, stderr) = swlw(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("status = ok"));

    let fields = fs::read_to_string(out.join("fields.csv")).unwrap();
    assert_eq!(fields.lines().next(), Some(FIELDS_CSV_HEADER));
    assert_eq!(FIELDS_CSV_HEADER, "t,x,re_u,im_u,abs_u,v");
    // Three snapshots of 500 cells.
    assert_eq!(fields.lines().count(), 1 + 3 * 500);

    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(
        diag.lines().next(),
        Some("t,mass_u,l2_v,linf_v,l4_u,dplus_u_l2,energy,qtv_cum,visc_cum,entropy_pos,boundary_max_u")
    );
    assert_eq!(diag.lines().next(), Some(DiagnosticsRecord::CSV_HEADER));
    for line in diag.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 11);
        assert!(cols.iter().all(|c| c.is_finite()));
    }

    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    for key in ["tau = ", "lambda_lf = ", "gamma_lf = "] {
        let line = summary.lines().find(|l| l.starts_with(key)).unwrap();
        assert!(line.ends_with("(auto)"), "{line}");
    }
    assert!(summary.contains("scheme = fully_discrete"));
}

#[test]
fn replay_produces_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_RUN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(swlw(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(swlw(&["run", "--config", &cfg, "--out", b.to_str().unwrap()]).0, 0);
    for name in ["fields.csv", "diagnostics.csv", "summary.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn overrides_apply_after_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT_RUN);
    let out = dir.path().join("out");
    let (code, _, stderr) = swlw(&[
        "run", "--config", &cfg, "--out", out.to_str().unwrap(), "--override", "h=0.4", "--override", "tau=0.05",
    ]);
    assert_eq!(code, 0, "{stderr}");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("n_cells = 250"));
    assert!(summary.contains("tau = 5.0000000000000003e-2\n"), "{summary}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cfg = write_config(dir.path(), "problem = linear_tw\nh = -1\n");
    let (code, _, stderr) = swlw(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(code, 2);
    assert!(stderr.contains("h"), "{stderr}");

    let cfg = write_config(dir.path(), "problem = linear_tw\nmesh = 0.1\n");
    assert_eq!(swlw(&["run", "--config", &cfg, "--out", out]).0, 2);

    let missing = dir.path().join("missing.cfg");
    assert_eq!(swlw(&["run", "--config", missing.to_str().unwrap(), "--out", out]).0, 2);

    // The general problem has no exact solution to study against.
    let cfg = write_config(dir.path(), "problem = general\n");
    assert_eq!(swlw(&["study", "--config", &cfg, "--out", out]).0, 2);
}

#[test]
fn newton_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "problem = general\nh = 0.1\nT = 0.1\nnewton_max_iter = 1\nnewton_tol = 1e-15\n");
    let out = dir.path().join("out");
    let (code, _, stderr) = swlw(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{stderr}");
}

#[test]
fn failed_certification_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cfg = write_config(dir.path(), "problem = general\ncertify.samples = 500\nlambda_lf = 100\n");
    let (code, stdout, _) = swlw(&["certify", "--config", &cfg, "--out", out]);
    assert_eq!(code, 4);
    assert!(stdout.contains("FAIL"));
    assert!(fs::read_to_string(Path::new(out).join("certification.txt")).unwrap().contains("overall: FAIL"));

    let cfg = write_config(dir.path(), "problem = general\ncertify.samples = 500\nflux = godunov\n");
    assert_eq!(swlw(&["certify", "--config", &cfg, "--out", out]).0, 0);
}

#[test]
fn study_writes_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "problem = linear_tw\nT = 0.5\nstudy.h_list = 0.4, 0.2, 0.1\n");
    let out = dir.path().join("out");
    let (code, _, stderr) = swlw(&["study", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let csv = fs::read_to_string(out.join("study.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].ends_with("NaN,NaN"));
}
