//! Acceptance: report determinism. Running the same analysis twice, with
//! different worker counts, must produce byte-identical output.

use std::path::Path;
use std::process::{Command, Output};

fn run_with_threads(csv: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-bvs"))
        .args(["analyze", "--data", csv.to_str().unwrap()])
        .env("ROBUST_BVS_THREADS", threads)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_11_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let mut text = String::from("y,x1,x2,x3,x4\n");
    let mut state = 0x243f6a8885a308d3u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for _ in 0..60 {
        let x: Vec<f64> = (0..4).map(|_| next()).collect();
        let y = 1.5 * x[0] - 0.8 * x[2] + 0.3 * next();
        text.push_str(&format!(
            "{y:.9},{:.9},{:.9},{:.9},{:.9}\n",
            x[0], x[1], x[2], x[3]
        ));
    }
    std::fs::write(&csv, text).unwrap();

    let first = run_with_threads(&csv, "1");
    let second = run_with_threads(&csv, "1");
    let wide = run_with_threads(&csv, "8");
    assert!(first.status.success());

    let identical_rerun = first.stdout == second.stdout;
    let identical_threads = first.stdout == wide.stdout;
    println!(
        "[criterion 11] {}  byte-identical reports: rerun = {identical_rerun}, across thread counts = {identical_threads}",
        if identical_rerun && identical_threads { "PASS" } else { "FAIL" }
    );
    assert!(identical_rerun && identical_threads);
}
