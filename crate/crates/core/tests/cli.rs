//! End-to-end tests of the `ustpa` binary: exit codes, stdout/stderr text,
//! and written report artifacts. Every invocation runs the real executable
//! via `CARGO_BIN_EXE_ustpa`.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn model_path() -> String {
    fixture("noa_highway.ustpa").display().to_string()
}

/// Runs the binary with `args` and returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_ustpa"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("binary exits normally"),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

#[test]
fn check_reports_element_counts() {
    let (code, out, err) = run(&["check", &model_path()]);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(out, "ok: 4 losses, 6 hazards, 14 ucas, 20 scenarios, 17 requirements\n");
}

#[test]
fn unreadable_file_exits_3() {
    let (code, _, err) = run(&["check", "/nonexistent/model.ustpa"]);
    assert_eq!(code, 3);
    assert!(err.contains("cannot read"), "stderr: {err}");
}

#[test]
fn parse_failure_exits_2_with_positioned_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ustpa");
    std::fs::write(&path, "model \"x\"\nloss ??? \"oops\"\n").unwrap();
    let (code, _, err) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("2:6"), "diagnostic should carry line:column, stderr: {err}");
    assert!(err.contains("error:"), "stderr: {err}");
}

#[test]
fn validation_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dangling.ustpa");
    std::fs::write(&path, "model \"x\"\nloss L1 \"a\"\nhazard H1 \"b\" losses=[L1 L9]\n")
        .unwrap();
    let (code, _, err) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("references unknown loss `L9`"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    let (code, _, _) = run(&["check"]);
    assert_eq!(code, 3, "missing argument is a usage error");
    let (code, _, _) = run(&["--no-such-flag"]);
    assert_eq!(code, 3);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}

#[test]
fn audit_lists_orphan_ucas_and_strict_fails() {
    let (code, out, _) = run(&["audit", &model_path()]);
    assert_eq!(code, 0, "warnings alone do not fail a non-strict audit");
    let expected = "\
warning: UCA `UCA-IG2` has no causal scenario
warning: UCA `UCA-DP1` has no causal scenario
warning: UCA `UCA-DP2` has no causal scenario
warning: UCA `UCA-LT2` has no causal scenario
warning: UCA `UCA-LT4` has no causal scenario
warning: UCA `UCA-VF2` has no causal scenario
warning: UCA `UCA-DT1` has no causal scenario
warning: UCA `UCA-DT2` has no causal scenario
8 finding(s)
";
    assert_eq!(out, expected);

    let (code, _, _) = run(&["--strict", "audit", &model_path()]);
    assert_eq!(code, 1);
}

#[test]
fn ucas_prints_worksheet_and_gaps() {
    let (code, out, _) = run(&["ucas", &model_path()]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "action  not_provided  provided_improperly  mistimed  inappropriate_duration"
    );
    assert_eq!(lines[1], "CA-IG1  UCA-IG1       -                    -         -");
    assert_eq!(lines.len(), 1 + 14 + 42 + 1, "header + rows + gap lines + coverage");
    assert_eq!(out.lines().filter(|l| l.starts_with("gap: ")).count(), 42);
    assert!(out.ends_with("coverage: 14/56 (0.2500)\n"));

    let (code, _, _) = run(&["ucas", &model_path(), "--strict"]);
    assert_eq!(code, 1, "strict fails while gaps remain");
}

#[test]
fn ucas_applies_waivers() {
    let waivers = fixture("waivers/reviewed_gaps.waivers").display().to_string();
    let (code, out, _) = run(&["ucas", &model_path(), "--waivers", &waivers]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("waived: ")).count(), 3);
    assert!(out.contains(
        "waived: CA-VF1 inappropriate_duration (Trajectory validation is a one-shot gate"
    ));
    assert_eq!(out.lines().filter(|l| l.starts_with("gap: ")).count(), 39);
    assert!(out.ends_with("coverage with waivers: 17/56 (0.3036)\n"));
}

#[test]
fn ucas_reports_redundant_and_unknown_waivers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sloppy.waivers");
    std::fs::write(
        &path,
        "CA-IG1 not_provided \"cell is already documented\"\nCA-XX mistimed \"typo\"\n",
    )
    .unwrap();
    let (code, out, _) =
        run(&["ucas", &model_path(), "--waivers", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("redundant waiver: CA-IG1 not_provided"), "stdout: {out}");
    assert!(out.contains("unknown action in waiver: CA-XX mistimed"), "stdout: {out}");
}

#[test]
fn malformed_waiver_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.waivers");
    std::fs::write(&path, "CA-IG1 sideways \"no such mode\"\n").unwrap();
    let (code, _, err) =
        run(&["ucas", &model_path(), "--waivers", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("sideways"), "stderr: {err}");
}

#[test]
fn coverage_prints_all_metrics() {
    let (code, out, _) = run(&["coverage", &model_path()]);
    assert_eq!(code, 0);
    let expected = "\
uca mode coverage: 14/56 (0.2500)
per-stage ucas: IG=2 DP=3 LT=4 VF=2 DT=3
per-mode ucas: not_provided=4 provided_improperly=8 mistimed=2 inappropriate_duration=0
hazard mitigation: 5/6 (0.8333)
loss mitigation: 4/4 (1.0000)
unmitigated: H5
";
    assert_eq!(out, expected);

    let (code, _, _) = run(&["coverage", &model_path(), "--strict"]);
    assert_eq!(code, 1, "strict fails on unmitigated hazards");
}

#[test]
fn trace_walks_both_directions() {
    let (code, out, _) = run(&["trace", &model_path(), "--from", "SR-DT3-1", "--dir", "down"]);
    assert_eq!(code, 0);
    let expected = "\
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H4 -> L1
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H4 -> L2
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H4 -> L3
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H4 -> L4
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H6 -> L1
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H6 -> L2
SR-DT3-1 -> CS-DT3-1 -> UCA-DT3 -> H6 -> L4
";
    assert_eq!(out, expected);

    let (code, out, _) = run(&["trace", &model_path(), "--from", "L1", "--dir", "up"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 39);
    assert_eq!(out.lines().next(), Some("L1 -> H1 -> UCA-IG2"));

    let (code, out, _) = run(&["trace", &model_path(), "--from", "L1", "--dir", "down"]);
    assert_eq!(code, 0);
    assert_eq!(out, "no downstream paths from L1\n");
}

#[test]
fn trace_rejects_unknown_and_invalid_ids() {
    let (code, _, err) = run(&["trace", &model_path(), "--from", "NOPE", "--dir", "down"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown id `NOPE`"), "stderr: {err}");

    let (code, _, err) = run(&["trace", &model_path(), "--from", "9bad", "--dir", "down"]);
    assert_eq!(code, 3);
    assert!(err.contains("invalid identifier"), "stderr: {err}");
}

#[test]
fn report_writes_selected_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    let (code, out, _) = run(&[
        "report",
        &model_path(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "all",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("wrote ")).count(), 3);
    let json = std::fs::read_to_string(out_dir.join("noa_highway.report.json")).unwrap();
    let md = std::fs::read_to_string(out_dir.join("noa_highway.report.md")).unwrap();
    let dot = std::fs::read_to_string(out_dir.join("noa_highway.dot")).unwrap();
    assert!(json.starts_with('{'));
    assert!(md.starts_with("# Safety Analysis Report: NOA Highway Pilot"));
    assert!(dot.starts_with("digraph \"NOA Highway Pilot\""));

    let only_json = dir.path().join("json_only");
    let (code, out, _) = run(&[
        "report",
        &model_path(),
        "--out",
        only_json.to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(only_json.join("noa_highway.report.json").exists());
    assert!(!only_json.join("noa_highway.report.md").exists());
}

#[test]
fn report_into_unwritable_directory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out_dir = blocker.join("sub");
    let (code, _, err) =
        run(&["report", &model_path(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("error"), "stderr: {err}");
}

#[test]
fn simulate_replays_fixture_traces() {
    let trace = fixture("traces/degraded_recovery.trace").display().to_string();
    let (code, out, _) = run(&["simulate", &model_path(), "--trace", &trace]);
    assert_eq!(code, 0);
    let expected = "\
0 continue
1 continue
2 continue
3 continue
4 continue
5 performance_degradation perception->LT
6 performance_degradation
7 performance_degradation
8 continue
9 continue
10 continue
";
    assert_eq!(out, expected);

    let trace = fixture("traces/deactivation.trace").display().to_string();
    let (code, out, _) = run(&["simulate", &model_path(), "--trace", &trace]);
    assert_eq!(code, 0);
    let expected = "\
0 takeover_request trajectory->VF
1 system_deactivation trajectory->VF
2 system_deactivation
3 system_deactivation
4 system_deactivation
";
    assert_eq!(out, expected);
}

#[test]
fn simulate_accepts_explicit_policy_matching_defaults() {
    let trace = fixture("traces/critical_takeover.trace").display().to_string();
    let policy = fixture("policies/default.policy").display().to_string();
    let (_, without, _) = run(&["simulate", &model_path(), "--trace", &trace]);
    let (code, with, _) =
        run(&["simulate", &model_path(), "--trace", &trace, "--policy", &policy]);
    assert_eq!(code, 0);
    assert_eq!(without, with, "bundled policy file mirrors the built-in defaults");
    assert!(with.contains("1 takeover_request trajectory->VF"));
}

#[test]
fn simulate_writes_text_and_json_logs() {
    let dir = tempfile::tempdir().unwrap();
    let trace = fixture("traces/deactivation.trace").display().to_string();

    let text_log = dir.path().join("run.log");
    let (code, out, _) = run(&[
        "simulate",
        &model_path(),
        "--trace",
        &trace,
        "--log",
        text_log.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let written = std::fs::read_to_string(&text_log).unwrap();
    assert_eq!(written, out, "log file mirrors stdout for non-json paths");

    let json_log = dir.path().join("run.json");
    let (code, _, _) = run(&[
        "simulate",
        &model_path(),
        "--trace",
        &trace,
        "--log",
        json_log.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let written = std::fs::read_to_string(&json_log).unwrap();
    assert!(written.starts_with("{\n  \"decisions\": ["), "json log: {written}");
    assert!(written.contains("\"note\": \"trajectory reported critical\""));
}

#[test]
fn simulate_rejects_bad_inputs() {
    let (code, _, _) = run(&["simulate", &model_path(), "--trace", "/nonexistent.trace"]);
    assert_eq!(code, 3, "unreadable trace file is an I/O error");

    let dir = tempfile::tempdir().unwrap();
    let bad_trace = dir.path().join("bad.trace");
    std::fs::write(&bad_trace, "0 ego_motion warp\n").unwrap();
    let (code, _, err) =
        run(&["simulate", &model_path(), "--trace", bad_trace.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("warp"), "stderr: {err}");

    let bad_policy = dir.path().join("bad.policy");
    std::fs::write(&bad_policy, "policy { hold = 0 }\n").unwrap();
    let trace = fixture("traces/nominal_100.trace").display().to_string();
    let (code, _, _) = run(&[
        "simulate",
        &model_path(),
        "--trace",
        &trace,
        "--policy",
        bad_policy.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}
