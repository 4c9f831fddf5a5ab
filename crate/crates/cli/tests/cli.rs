use std::fs;
use std::process::{Command, Output};

fn invlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invlab")).args(args).output().unwrap()
}

const SMALL: &[&str] = &[
    "run",
    "--fine",
    "61",
    "--coarse",
    "21",
    "--freq-lengths",
    "4",
    "--freq-angles",
    "8",
    "--k",
    "4",
];

#[test]
fn selftest_passes() {
    let out = invlab(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("[PASS]"));
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn small_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let mut args = SMALL.to_vec();
    args.extend(["--noise", "0.05", "--seed", "3", "--out", out_dir.to_str().unwrap()]);
    let out = invlab(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "fourier_samples.csv",
        "reconstruction.csv",
        "oracle_residuals.csv",
        "recon.pgm",
        "error.pgm",
        "metrics.json",
        "manifest.json",
    ] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let samples = fs::read_to_string(out_dir.join("fourier_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 32);
    assert!(fs::read(out_dir.join("recon.pgm"))
        .unwrap()
        .starts_with(b"P5\n21 21\n255\n"));
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["max_abs_error"].as_f64().unwrap().is_finite());
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL.to_vec();
    args.extend(["--m", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(invlab(&args).status.code(), Some(2));
    let mut args = SMALL.to_vec();
    args.extend([
        "--algorithm",
        "frechet",
        "--m",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(invlab(&args).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut args = SMALL.to_vec();
    let target = blocker.join("sub");
    args.extend(["--out", target.to_str().unwrap()]);
    assert_eq!(invlab(&args).status.code(), Some(4));
}

#[test]
fn oracle_prints_csv() {
    let out = invlab(&[
        "oracle",
        "--fine",
        "61",
        "--k",
        "4",
        "--freq-lengths",
        "3",
        "--freq-angles",
        "4",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert!(lines.next().unwrap().starts_with("kappa,theta"));
    assert_eq!(lines.count(), 12);
}
