//! End-to-end tests driving the compiled `qcc` binary: exit codes, console
//! reports, and the report files, which must parse with the same loaders
//! that wrote them.

use std::path::Path;
use std::process::{Command, Output};

use qcc_cli::comparison_from_csv;
use qcc_core::circuit::Circuit;
use qcc_core::profiler::{plot_data_from_csv, records_from_csv, summary_from_json};

fn qcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn smallest_pipeline_profiles_and_verifies() {
    let output = qcc(&[
        "profile", "--circuit", "ghz", "--qubits", "3", "--level", "0", "--reps", "1",
        "--target", "line:3", "--verify",
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("ghz(3) level 0 on line:3, 1 repetition"), "{text}");
    assert!(text.contains("verification passed"), "{text}");
    assert!(text.contains("max amplitude deviation"), "{text}");
}

#[test]
fn rejects_level_out_of_range() {
    let output = qcc(&[
        "profile", "--circuit", "qft", "--qubits", "100", "--level", "5",
        "--target", "line:100",
    ]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("0..=3"), "{}", stderr(&output));
}

#[test]
fn rejects_unknown_circuit_family() {
    let output = qcc(&[
        "profile", "--circuit", "bell", "--qubits", "2", "--level", "0",
        "--target", "line:2",
    ]);
    assert_eq!(exit_code(&output), 2);
    let err = stderr(&output);
    assert!(err.contains("qft") && err.contains("ghz"), "{err}");
}

#[test]
fn rejects_quick_combined_with_reps() {
    let output = qcc(&[
        "profile", "--circuit", "ghz", "--qubits", "3", "--level", "0",
        "--reps", "5", "--quick", "--target", "line:3",
    ]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn oversized_circuit_fails_compilation() {
    let output = qcc(&[
        "profile", "--circuit", "ghz", "--qubits", "5", "--level", "0", "--reps", "1",
        "--target", "line:3",
    ]);
    assert_eq!(exit_code(&output), 3);
    let err = stderr(&output);
    assert!(err.contains("compilation failed"), "{err}");
    assert!(err.contains("TrivialLayout"), "{err}");
}

#[test]
fn verification_size_limit_is_a_usage_error() {
    let output = qcc(&[
        "verify", "--circuit", "ghz", "--qubits", "11", "--level", "0",
        "--target", "line:11",
    ]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("limited to 10 qubits"), "{}", stderr(&output));
}

#[test]
fn verify_passes_at_the_size_boundary() {
    let output = qcc(&[
        "verify", "--circuit", "ghz", "--qubits", "10", "--level", "3",
        "--target", "line:10",
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("max amplitude deviation"), "{text}");
    assert!(text.contains("equivalence holds"), "{text}");

    let output = qcc(&[
        "verify", "--circuit", "qft", "--qubits", "7", "--level", "2",
        "--target", "grid:2x4",
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
}

#[test]
fn profile_reports_parse_with_their_own_loaders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let output = qcc(&[
        "profile", "--circuit", "qft", "--qubits", "4", "--level", "2", "--quick",
        "--target", "grid:2x2", "--out", out,
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert!(stdout(&output).contains("wrote"), "{}", stdout(&output));

    let records = records_from_csv(&read(dir.path(), "records.csv")).unwrap();
    assert!(!records.is_empty());
    let run_ids: std::collections::BTreeSet<u64> = records.iter().map(|r| r.run_id).collect();
    assert_eq!(run_ids.len(), 3, "one run id per repetition");

    let summary = summary_from_json(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary.repetitions, 3);
    assert_eq!(summary.configuration.label(), "qft(4) level 2 on grid:2x2");

    let plot = plot_data_from_csv(&read(dir.path(), "plot_data.csv")).unwrap();
    assert_eq!(plot.len(), summary.passes.len());

    let compiled = Circuit::from_text(&read(dir.path(), "circuit.txt")).unwrap();
    assert_eq!(compiled.num_qubits(), 4);
}

#[test]
fn compare_levels_emits_four_summaries_and_a_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let output = qcc(&[
        "compare-levels", "--circuit", "qft", "--qubits", "5", "--reps", "2",
        "--target", "line:5", "--out", out,
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));

    let rows = comparison_from_csv(&read(dir.path(), "comparison.csv")).unwrap();
    let levels: Vec<u8> = rows.iter().map(|r| r.level).collect();
    assert_eq!(levels, [0, 1, 2, 3]);
    assert!(rows.iter().all(|r| r.repetitions == 2));
    assert!(rows.iter().all(|r| r.total_wall_median_ns > 0.0));

    let optimization_passes = [
        "InverseCancellation",
        "Optimize1QGates",
        "FixedPoint",
        "MinimumPoint",
    ];
    assert!(
        rows[3].passes.iter().any(|p| p == "MinimumPoint"),
        "level 3 executes MinimumPoint: {:?}",
        rows[3].passes
    );
    assert!(
        !rows[0].passes.iter().any(|p| optimization_passes.contains(&p.as_str())),
        "level 0 executes no optimization pass: {:?}",
        rows[0].passes
    );

    for level in 0..4 {
        let summary =
            summary_from_json(&read(dir.path(), &format!("summary_level{level}.json"))).unwrap();
        assert_eq!(summary.configuration.level, level as u8);
        for pass in &summary.passes {
            assert!(
                pass.stats.min <= pass.stats.max,
                "level {level} {}: {:?}",
                pass.pass_name,
                pass.stats
            );
        }
    }

    let text = stdout(&output);
    assert!(text.contains("MinimumPoint"), "{text}");
    assert!(text.contains("top pass"), "{text}");
}

#[test]
fn compare_levels_verifies_every_level() {
    let output = qcc(&[
        "compare-levels", "--circuit", "ghz", "--qubits", "8", "--reps", "1",
        "--target", "line:8", "--verify",
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    for level in 0..4 {
        assert!(
            text.contains(&format!("level {level} verification passed")),
            "{text}"
        );
    }
}

#[test]
fn identical_invocations_write_identical_circuits() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    for dir in [&first, &second] {
        let output = qcc(&[
            "profile", "--circuit", "qft", "--qubits", "5", "--level", "3", "--quick",
            "--target", "line:5", "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    }
    assert_eq!(
        read(first.path(), "circuit.txt"),
        read(second.path(), "circuit.txt"),
        "compilation must be deterministic"
    );
}
