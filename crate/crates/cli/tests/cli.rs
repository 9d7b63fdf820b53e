use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdm-dirac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn surface_single_node() {
    let o = run(&["surface", "--box", "0.5,0.5,1,1", "--grid", "2x2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "eta,lambda,f\n0.5,1,-4.6213203435596428\n");
}

#[test]
fn surface_restricted_box_is_negative() {
    let o = run(&["surface", "--box", "-1,1,1,10", "--grid", "41x41"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# eta=0 skipped"));
    let max = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max < 0.0);
}

#[test]
fn surface_invalid_box_exits_2() {
    let o = run(&["surface", "--box", "-1.5,1,0,10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn spectrum_reference_rows() {
    let o = run(&[
        "spectrum", "--eta", "0.5", "--lambda", "1", "--M0", "1", "--n-max", "3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[0], "0");
    assert!((row[1].parse::<f64>().unwrap() + 0.207_106_8).abs() < 1e-7);
    assert!((row[2].parse::<f64>().unwrap() + 4.621_320_3).abs() < 1e-7);
    assert_eq!(row[3], "Imaginary");
}

#[test]
fn spectrum_eta_zero_exits_2() {
    let o = run(&["spectrum", "--eta", "0", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta = 0"));
}

#[test]
fn potential_origin_row() {
    let o = run(&[
        "potential",
        "--eta",
        "0.5",
        "--M0",
        "1",
        "--alpha",
        "1",
        "--samples",
        "3",
        "--x-range",
        "-1,1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().nth(2), Some("0,1,0.25,1"));
}

#[test]
fn control_well_verdict_dissents() {
    let o = run(&[
        "verdict",
        "--eta",
        "0.5",
        "--lambda",
        "1",
        "--control-well",
        "--grid",
        "41x41",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["statement"], "SpectrumRealFound");
    assert_eq!(v["numeric"]["potential"], "control-well");
}

#[test]
fn hermitian_verdict_is_inconclusive() {
    let o = run(&[
        "verdict", "--eta", "0", "--lambda", "1", "--grid", "41x41", "--N", "2000",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["errors"].as_array().unwrap().is_empty());
}

#[test]
fn verdict_rejects_csv() {
    let o = run(&[
        "verdict", "--eta", "0.5", "--lambda", "1", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verdict", "--eta", "0.9", "--lambda", "0.2", "--grid", "41x41", "--seed", "7",
    ];
    let dumped = run(&[&args[..], &["--dump-config"]].concat());
    assert!(dumped.status.success());
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, &dumped.stdout).unwrap();

    let direct = run(&args);
    let via_config = run(&["verdict", "--config", cfg.to_str().unwrap()]);
    assert_eq!(direct.status.code(), Some(0));
    assert_eq!(direct.stdout, via_config.stdout);
}

#[test]
fn config_rejects_unknown_keys_and_mixed_sources() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"eta": 0.5, "lambda": 1, "beta": 2}"#).unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&cfg, r#"{"eta": 0.5, "lambda": 1}"#).unwrap();
    let o = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--eta",
        "0.4",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = run(&["surface", "--grid", "5x5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("eta,lambda,f\n"));
    // error run leaves the previous file intact
    let o = run(&[
        "surface",
        "--box",
        "0,2,0,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "verdict", "--eta", "0.5", "--lambda", "1", "--grid", "61x61", "--N", "3000",
    ];
    let single = Command::new(env!("CARGO_BIN_EXE_pdm-dirac"))
        .args(args)
        .env("PDM_DIRAC_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_pdm-dirac"))
        .args(args)
        .env("PDM_DIRAC_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(single.stdout, many.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_pdm-dirac"))
        .args(["surface", "--grid", "3x3"])
        .env("PDM_DIRAC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
