//! Black-box tests of the command-line surface: exit codes, configuration
//! merging, output formats.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robust-bvs"))
}

fn write_demo_csv(path: &Path) {
    let mut text = String::from("y,x1,x2,x3\n");
    // y tracks 2*x1 with mild noise; deterministic synthetic rows.
    let rows = [
        (1.2, 0.5, 1.1, -0.3),
        (2.3, 1.0, 0.4, 0.8),
        (0.8, -0.2, 0.9, 0.1),
        (3.1, 1.7, -0.6, 1.2),
        (1.9, 0.8, 0.3, 0.4),
        (2.7, 1.4, 1.0, -0.9),
        (0.4, -0.5, 0.2, 0.6),
        (1.6, 0.7, -0.4, -0.2),
        (2.2, 1.1, 0.8, 0.9),
        (1.0, 0.1, -0.1, 0.3),
        (2.9, 1.5, 0.5, -0.5),
        (1.4, 0.6, 1.2, 0.7),
    ];
    for (y, a, b, c) in rows {
        text.push_str(&format!("{y},{a},{b},{c}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn analyze_produces_versioned_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["data"]["n"], 12);
    assert_eq!(report["data"]["p"], 3);
    assert_eq!(report["evaluated_fraction"], 1.0);
    // The strong predictor must top the ranking and sit in the HPM.
    assert_eq!(report["models"][0]["columns"][0], "x1");
    assert!(report["hpm"]["columns"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c == "x1"));
    let models = report["models"].as_array().unwrap();
    assert_eq!(models.len(), 8);
    let total: f64 = models.iter().map(|m| m["posterior_prob"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    for m in models {
        let pr = m["posterior_prob"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&pr));
    }
    assert!(report["plot_data"]["inclusion_tsv"].as_str().unwrap().starts_with("column\t"));
}

#[test]
fn model_table_is_sorted_by_probability_then_mask() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let models = report["models"].as_array().unwrap();
    for w in models.windows(2) {
        let (p0, p1) =
            (w[0]["posterior_prob"].as_f64().unwrap(), w[1]["posterior_prob"].as_f64().unwrap());
        assert!(
            p0 > p1
                || (p0 == p1 && w[0]["mask"].as_u64().unwrap() < w[1]["mask"].as_u64().unwrap())
        );
    }
}

#[test]
fn missing_file_is_a_data_error() {
    let out = run(&["analyze", "--data", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap(), "--preset", "zellner"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap(), "--response", "nope"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn non_numeric_cell_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "y,x1\n1.0,2.0\n3.0,oops\n").unwrap();
    let out = run(&["analyze", "--data", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3") && err.contains("x1"), "stderr: {err}");
}

#[test]
fn missing_value_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gap.csv");
    std::fs::write(&csv, "y,x1\n1.0,2.0\n3.0,\n").unwrap();
    let out = run(&["analyze", "--data", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn null_only_dataset_reports_single_certain_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("null.csv");
    std::fs::write(&csv, "y\n1.0\n2.0\n3.5\n").unwrap();
    let out = run(&["analyze", "--data", csv.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let models = report["models"].as_array().unwrap();
    assert_eq!(models.len(), 1);
    assert_eq!(models[0]["posterior_prob"], 1.0);
    assert_eq!(report["data"]["p"], 0);
}

#[test]
fn csv_format_emits_model_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "mask,columns,k,sse,q,log_bf,log_prior_odds,posterior_prob");
    assert_eq!(lines.count(), 8);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "# analysis settings\ndata = {}\npreset = hyper-g\nformat = csv\n",
            csv.display()
        ),
    )
    .unwrap();

    // File alone: csv output.
    let out = run(&["analyze", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("mask,"));

    // Flag overrides the file's format.
    let out = run(&["analyze", "--config", conf.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["preset"], "hyper-g");
    assert_eq!(report["config"]["output_format"], "json");
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--data",
        csv.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn mc3_search_is_reported_and_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let args = [
        "analyze",
        "--data",
        csv.to_str().unwrap(),
        "--search",
        "mc3",
        "--mc3-iterations",
        "2000",
        "--mc3-seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["search"]["kind"], "mc3");
    assert!(report["search"]["mc3"]["accepted"].as_u64().is_some());
    assert!(report["evaluated_fraction"].as_f64().unwrap() <= 1.0);
}

#[test]
fn sigma_known_flag_runs_the_known_variance_path() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out = run(&["analyze", "--data", csv.to_str().unwrap(), "--sigma-known", "0.5"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["sigma_known"], 0.5);
}

#[test]
fn rejects_constant_rho_below_support_bound() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    write_demo_csv(&csv);
    let out =
        run(&["analyze", "--data", csv.to_str().unwrap(), "--rho", "constant:0.0001"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_fast_tier_passes() {
    let out = run(&["validate", "--tier", "fast"]);
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.is_empty() || l.starts_with("PASS")));
    assert!(text.contains("route-agreement"));
}

#[test]
fn validate_full_tier_emits_the_consistency_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("consistency.tsv");
    let out = run(&["validate", "--tier", "full", "--consistency-out", tsv.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(&tsv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "n\treplicate\tmodel_mask\tposterior_prob");
    assert_eq!(lines.count(), 200); // 4 sample sizes x 50 replicates
}

#[test]
fn streaming_parse_handles_wide_tall_input() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("big.csv");
    {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&csv).unwrap());
        let cols: Vec<String> = (0..20).map(|j| format!("x{j}")).collect();
        writeln!(f, "y,{}", cols.join(",")).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..100_000 {
            let xs: Vec<String> = (0..20).map(|_| format!("{:.6}", next())).collect();
            writeln!(f, "{:.6},{}", next(), xs.join(",")).unwrap();
        }
    }
    let out = run(&["analyze", "--data", csv.to_str().unwrap(), "--max-dim", "1", "--format", "csv"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 22); // header + null + 20 singletons
}
