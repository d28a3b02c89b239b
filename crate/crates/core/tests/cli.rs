mod common;

use std::fs;

use common::*;
use serde_json::Value;

fn write_example(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("example.ppm");
    fs::write(&path, netpbm(4, 4, 3, &worked_example_samples())).unwrap();
    path
}

#[test]
fn compress_worked_example_reports_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let out = dir.path().join("out.png");
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "2",
        "--backend",
        "ideal",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["qubits"], 1);
    assert_eq!(r["config"]["backend"], "ideal");
    assert!(r["config"]["shots"].is_null());
    assert_close(
        &f64s(&r["blocks"]["sums"]),
        &[3.0, 3.0, 6.0, 12.0],
        1e-12,
        "sums",
    );
    assert_close(
        &f64s(&r["histogram"]["estimated_counts"]),
        &[3.0, 1.0],
        1e-12,
        "estimated",
    );
    assert_eq!(r["image"]["grid_rows"], 2);
    assert_eq!(r["image"]["block_len"], 12);
    assert!(r["fidelity"]["tvd"].is_null());
    assert!(r["fidelity"]["timings"].is_null());

    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("embed time:") && stderr.contains("qubits=1"),
        "{stderr}"
    );
}

#[test]
fn sampled_run_reports_shots_and_tvd() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "2",
        "--shots",
        "1000",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["shots"], 1000);
    assert_eq!(r["config"]["seed"], 9);
    let shots: u64 = r["quantum"]["shot_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(shots, 1000);
    let tvd = r["fidelity"]["tvd"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&tvd));
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "2",
        "--timings",
    ]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["fidelity"]["timings"]["embed_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_report_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let report = dir.path().join("r.csv");
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "4",
        "--backend",
        "ideal",
        "--format",
        "csv",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("input,bins,qubits,"));
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[1], "4");
    assert_eq!(fields[2], "2");
}

#[test]
fn constant_image_reports_infinite_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.pgm");
    fs::write(&input, netpbm(6, 4, 1, &[90u8; 24])).unwrap();
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "7",
    ]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["fidelity"]["mse"], 0.0);
    assert_eq!(r["fidelity"]["psnr_db"], "inf");
}

#[test]
fn sidecar_round_trip_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus_dir().join("coins.png");
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let out = run(&[
        "compress",
        input.to_str().unwrap(),
        "--bixel",
        "16x16",
        "--out",
        &p("a.png"),
        "--report",
        &p("a.json"),
        "--sidecar",
        &p("a.bxq"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(&[
        "reconstruct",
        "--sidecar",
        &p("a.bxq"),
        "--report",
        &p("a.json"),
        "--out",
        &p("b.png"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read(p("a.png")).unwrap(), fs::read(p("b.png")).unwrap());

    let mut bytes = fs::read(p("a.bxq")).unwrap();
    bytes.truncate(bytes.len() - 3);
    fs::write(p("bad.bxq"), &bytes).unwrap();
    let out = run(&[
        "reconstruct",
        "--sidecar",
        &p("bad.bxq"),
        "--report",
        &p("a.json"),
        "--out",
        &p("c.png"),
    ]);
    assert_eq!(out.status.code(), Some(15));
}

#[test]
fn sweep_writes_plot_ready_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_example(dir.path());
    let out = run(&[
        "sweep",
        input.to_str().unwrap(),
        "--bixel",
        "2x2",
        "--bins",
        "1,2,4",
        "--backend",
        "ideal",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bins,qubits,mse,psnr_db,tvd,embed_s,recon_s");
    assert_eq!(lines.len(), 4);
    let qubits: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(qubits, ["0", "1", "2"]);
}

#[test]
fn qubits_table_text_and_json() {
    let out = run(&["qubits", "--size", "3403x5266"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for (method, q) in [
        ("FRQI", "26"),
        ("NEQR", "49"),
        ("NCQI", "27"),
        ("PROPOSED", "5"),
    ] {
        let line = text
            .lines()
            .find(|l| l.starts_with(method))
            .unwrap_or_else(|| panic!("{method} missing"));
        assert!(line.split_whitespace().any(|t| t == q), "{line}");
    }

    let out = run(&[
        "qubits",
        "--pixels",
        "65536",
        "--channels",
        "1",
        "--bins",
        "128",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let q: Vec<u64> = v["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["qubits"].as_u64().unwrap())
        .collect();
    assert_eq!(q, [17, 24, 18, 7]);
}

fn exit_code(args: &[&str]) -> (Option<i32>, String) {
    let out = run(args);
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    fs::write(p("x.bmp"), b"BM not an image").unwrap();
    fs::write(
        p("trunc.png"),
        &fs::read(corpus_dir().join("camera.png")).unwrap()[..200],
    )
    .unwrap();
    fs::write(p("small.pgm"), netpbm(2, 2, 1, &[1, 2, 3, 4])).unwrap();

    let (code, err) = exit_code(&["compress", &p("missing.png")]);
    assert_eq!(code, Some(3));
    assert!(err.starts_with("error[file-not-found]"), "{err}");
    assert_eq!(exit_code(&["compress", &p("x.bmp")]).0, Some(4));
    assert_eq!(exit_code(&["compress", &p("trunc.png")]).0, Some(5));
    assert_eq!(
        exit_code(&["compress", &p("small.pgm"), "--bins", "0"]).0,
        Some(7)
    );
    assert_eq!(
        exit_code(&["compress", &p("small.pgm"), "--bixel", "0x2"]).0,
        Some(2)
    );
    assert_eq!(
        exit_code(&["compress", &p("small.pgm"), "--shots", "0"]).0,
        Some(14)
    );
    assert_eq!(
        exit_code(&[
            "compress",
            &p("small.pgm"),
            "--out",
            &p("no/such/dir/o.png")
        ])
        .0,
        Some(6)
    );
    assert_eq!(exit_code(&["qubits", "--pixels", "0"]).0, Some(7));
    assert_eq!(exit_code(&["frobnicate"]).0, Some(2));
}
