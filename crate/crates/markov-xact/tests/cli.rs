//! End-to-end tests of the `markov-xact` binary: subcommand behavior, file
//! formats, exit codes, the `ERROR <code>: <message>` stderr contract, and
//! byte-level determinism of experiment output.

use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_markov-xact");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary launches")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env(key, value)
        .output()
        .expect("binary launches")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

/// Per-test scratch directory under the system temp dir.
fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("markov-xact-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn write(dir: &PathBuf, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).expect("write fixture");
    path.to_str().expect("utf-8 path").to_string()
}

const CYCLE3: &str = "3\n0 1 0\n0 0 1\n1 0 0\n";
const REV3: &str = "3\n0.5 0.25 0.25\n0.25 0.5 0.25\n0.25 0.25 0.5\n";

#[test]
fn gaps_reports_the_cycle_fixture() {
    let dir = scratch("gaps-cycle");
    let matrix = write(&dir, "p0.txt", CYCLE3);
    let out = run(&["gaps", &matrix]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"eta_a\": 0.0"), "got: {text}");
    let json: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let eta_p = json["eta_p"].as_f64().unwrap();
    assert!((eta_p - 3.0f64.sqrt()).abs() <= 1e-10);
    assert_eq!(json["eta_s"].as_f64().unwrap(), 1.5);
    assert_eq!(json["reversible"].as_bool().unwrap(), false);
    assert_eq!(json["irreducible"].as_bool().unwrap(), true);
    assert!(json.get("eta").is_none(), "eta must be absent: {text}");
}

#[test]
fn gaps_out_flag_writes_the_same_report() {
    let dir = scratch("gaps-out");
    let matrix = write(&dir, "p0.txt", CYCLE3);
    let to_stdout = run(&["gaps", &matrix]);
    let out_path = dir.join("report.json");
    let to_file = run(&["gaps", &matrix, "--out", out_path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert_eq!(stdout(&to_file), "", "--out must silence stdout");
    let written = std::fs::read_to_string(&out_path).expect("report written");
    assert_eq!(written, stdout(&to_stdout));
}

#[test]
fn gaps_missing_file_is_an_io_error() {
    let out = run(&["gaps", "/nonexistent/matrix.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("ERROR io_error: "),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn invalid_matrix_is_a_validation_error() {
    let dir = scratch("bad-matrix");
    let matrix = write(&dir, "bad.txt", "2\n0.9 0.9\n0.5 0.5\n");
    let out = run(&["gaps", &matrix]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("ERROR row_sum_violation: "),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn verify_passes_a_reversible_chain() {
    let dir = scratch("verify-ok");
    let matrix = write(&dir, "rev.txt", REV3);
    let out = run(&["verify", &matrix]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("OK: "), "got: {text}");
    assert!(text.contains(", 0 failed"), "got: {text}");
    assert!(!text.contains("\nFAIL "), "got: {text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 10);
}

#[test]
fn verify_unreachable_tolerance_exits_2() {
    let dir = scratch("verify-fail");
    let matrix = write(&dir, "rev.txt", REV3);
    let out = run(&["verify", &matrix, "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).starts_with("ERROR verification_failed: "),
        "got: {}",
        stderr(&out)
    );
    assert!(stdout(&out).contains("FAILED: "), "got: {}", stdout(&out));
}

#[test]
fn estimate_mle_reads_an_external_path() {
    let dir = scratch("estimate-path");
    let path = write(&dir, "walk.txt", "2\n0 1 0 1 0\n");
    let out = run(&["estimate", "--method", "mle", "--path", &path]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "method=MLE n=4 seed=0\n2\n0 0.5\n0.5 0\n");
}

#[test]
fn estimate_sce_output_is_symmetric_and_reproducible() {
    let dir = scratch("estimate-sce");
    let matrix = write(&dir, "rev.txt", REV3);
    let out_path = dir.join("est.txt");
    let args = [
        "estimate", "--method", "sce", "--matrix", &matrix, "--n", "400", "--seed", "9", "--out",
    ];
    let first = run(&[&args[..], &[out_path.to_str().unwrap()]].concat());
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    let text = std::fs::read_to_string(&out_path).expect("estimate written");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method=SCE n=400 seed=9");
    assert_eq!(lines[1], "3");
    let rows: Vec<Vec<&str>> = lines[2..5]
        .iter()
        .map(|l| l.split_whitespace().collect())
        .collect();
    for u in 0..3 {
        for v in 0..3 {
            assert_eq!(rows[u][v], rows[v][u], "asymmetric at ({u},{v})");
        }
    }

    let again = run(&["estimate", "--method", "sce", "--matrix", &matrix, "--n", "400", "--seed", "9"]);
    assert_eq!(stdout(&again), text, "same seed must reproduce the estimate");
}

#[test]
fn estimate_rejects_sce_with_a_path_file() {
    let dir = scratch("estimate-sce-path");
    let path = write(&dir, "walk.txt", "2\n0 1 0\n");
    let out = run(&["estimate", "--method", "sce", "--path", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("ERROR invalid_input: "),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn estimate_without_inputs_is_invalid() {
    let out = run(&["estimate", "--method", "mle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("ERROR invalid_input: "));
}

#[test]
fn bound_evaluates_the_published_tail_value() {
    let out = run(&[
        "bound", "--method", "mle", "--n", "10000", "--t", "0.05", "--gap", "0.5", "--sigma2",
        "0.1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "3.85742e-1\n");
}

#[test]
fn bound_mse_forms_omit_t() {
    let mle = run(&[
        "bound", "--method", "mle", "--n", "2000", "--gap", "0.2", "--reversible",
    ]);
    assert_eq!(stdout(&mle), "5.50000e-3\n");
    let sce = run(&["bound", "--method", "sce", "--n", "2000", "--gap", "0.2"]);
    assert_eq!(stdout(&sce), "9.50000e-3\n");
}

#[test]
fn bound_zero_gap_warns_vacuous() {
    let out = run(&[
        "bound", "--method", "sce", "--n", "100", "--t", "0.1", "--gap", "0", "--d", "5",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1.00000e0\n");
    assert!(
        stderr(&out).contains("WARN vacuous bound"),
        "got: {}",
        stderr(&out)
    );
}

#[test]
fn bound_generic_forms_require_t() {
    let out = run(&[
        "bound", "--method", "scalar", "--n", "100", "--gap", "0.5", "--sigma2", "0.1", "--M",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("ERROR invalid_input: "));
}

const SMALL_CONFIG: &str = r#"{
  "d_values": [3],
  "eta_values": [0.4],
  "n_values": [300],
  "trials": 8,
  "base_seed": 5,
  "methods": ["MLE", "SCE"]
}
"#;

#[test]
fn experiment_emits_the_documented_csv() {
    let dir = scratch("experiment-csv");
    let config = write(&dir, "cfg.json", SMALL_CONFIG);
    let out = run(&["experiment", "--config", &config]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.contains('\r'), "CSV must use LF line endings");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "method,d,eta,n,trials,mse,mse_stderr,bound,seed"
    );
    assert_eq!(lines.len(), 3, "header plus one record per method");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9, "bad record: {line}");
        assert!(fields[0] == "MLE" || fields[0] == "SCE");
        assert_eq!(fields[1], "3");
        assert_eq!(fields[2], "4.00000000000e-1");
        assert_eq!(fields[3], "300");
        assert_eq!(fields[4], "8");
        assert_eq!(fields[8], "5");
    }

    let again = run(&["experiment", "--config", &config]);
    assert_eq!(out.stdout, again.stdout, "experiment must be deterministic");
}

#[test]
fn experiment_is_invariant_to_worker_count() {
    let dir = scratch("experiment-threads");
    let config = write(&dir, "cfg.json", SMALL_CONFIG);
    let one = run_with_env(
        &["experiment", "--config", &config],
        "MARKOV_XACT_THREADS",
        "1",
    );
    let three = run_with_env(
        &["experiment", "--config", &config],
        "MARKOV_XACT_THREADS",
        "3",
    );
    let auto = run_with_env(
        &["experiment", "--config", &config],
        "MARKOV_XACT_THREADS",
        "0",
    );
    assert!(one.status.success() && three.status.success() && auto.status.success());
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(one.stdout, auto.stdout);
}

#[test]
fn experiment_ratio_mode_emits_ratio_csv() {
    let dir = scratch("experiment-ratio");
    let config = write(&dir, "cfg.json", SMALL_CONFIG);
    let out = run(&["experiment", "--config", &config, "--ratio"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,eta,n,trials,ratio,ratio_stderr,seed");
    assert_eq!(lines.len(), 2);
    let ratio: f64 = lines[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!(ratio > 0.0, "ratio must be positive: {text}");
}

#[test]
fn experiment_missing_config_reports_config_not_found() {
    let out = run(&["experiment", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("ERROR config_not_found: "),
        "got: {}",
        stderr(&out)
    );
}
