use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bcubic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcubic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_ascii_prefix() {
    let out = bcubic(&["generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "8", "--format", "ascii"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "10101110");
    let out = bcubic(&["generate", "--b", "0", "--c", "2", "--d", "-1", "--bits", "8", "--format", "ascii"]);
    assert_eq!(stdout(&out).trim(), "01110100");
}

#[test]
fn generate_zero_bits_is_empty() {
    for format in ["raw", "ascii", "words32le"] {
        let out = bcubic(&["generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "0", "--format", format]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty(), "{format}");
    }
}

#[test]
fn generate_rejects_bad_triple() {
    let out = bcubic(&["generate", "--b", "2", "--c", "1", "--d", "-1", "--bits", "8"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConditionViolation(i)"));
}

#[test]
fn raw_output_is_msb_first_and_deterministic() {
    let args = ["generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "16"];
    let first = bcubic(&args);
    assert_eq!(first.stdout, vec![0b1010_1110, 0b1010_1101]);
    assert_eq!(first.stdout, bcubic(&args).stdout);
}

#[test]
fn checkpoint_resume_matches_one_run() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.txt");
    let whole = bcubic(&["generate", "--b", "1", "--c", "5", "--d", "-3", "--bits", "3000", "--format", "ascii"]);
    let head = bcubic(&[
        "generate", "--b", "1", "--c", "5", "--d", "-3", "--bits", "1200", "--format", "ascii", "--checkpoint",
        path_str(&state),
    ]);
    let tail = bcubic(&["generate", "--resume", path_str(&state), "--bits", "1800", "--format", "ascii"]);
    assert_eq!(code(&tail), 0);
    assert_eq!(stdout(&head).trim().to_string() + stdout(&tail).trim(), stdout(&whole).trim());
}

#[test]
fn seed_set_pipeline_concatenates_in_descending_d() {
    let out = bcubic(&[
        "generate", "--seed-set", "0,3", "--per-seed-bits", "40", "--drop-prefix-bits", "8", "--format", "ascii",
    ]);
    assert_eq!(code(&out), 0);
    let mut expected = String::new();
    for d in ["-1", "-2", "-3"] {
        let one = bcubic(&["generate", "--b", "0", "--c", "3", "--d", d, "--bits", "40", "--format", "ascii"]);
        expected.push_str(&stdout(&one).trim()[8..]);
    }
    assert_eq!(stdout(&out).trim(), expected);
}

#[test]
fn seeds_reports_non_source_member() {
    let out = bcubic(&["seeds", "--b", "0", "--c", "8"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member_count"], 8);
    assert_eq!(v["parity_rule"], false);
    let last = &v["members"][7];
    assert_eq!((last["d"].as_str(), last["source"].as_bool()), (Some("-8"), Some(false)));
}

#[test]
fn seeds_gap_report_for_large_set() {
    let out = bcubic(&["seeds", "--b", "0", "--c", "1001", "--gaps", "--precision", "64"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member_count"], 1001);
    assert!(v["gaps"]["max_deviation"].as_f64().unwrap() < 0.003);
    assert_eq!(v["gaps"]["within_mean_value_bounds"], true);
}

#[test]
fn seeds_audit_and_distinctness() {
    let out = bcubic(&["seeds", "--b", "0", "--c", "9", "--audit-mergers", "1000", "--distinctness", "1000"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["merger_audit"]["Pass"].is_object());
    assert_eq!(v["distinctness"]["all_distinct"], true);
}

#[test]
fn seeds_rejects_bad_shape() {
    let out = bcubic(&["seeds", "--b", "5", "--c", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidShape"));
}

#[test]
fn mt_verify_and_recover() {
    assert_eq!(code(&bcubic(&["mt", "verify", "--count", "10000"])), 0);
    let out = bcubic(&["mt", "recover", "--count", "2000"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["matches_bundled"], true);
}

#[test]
fn mt_verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let words = dir.path().join("mt.bin");
    assert_eq!(
        code(&bcubic(&["mt", "gen", "--count", "3000", "--format", "words32le", "--out", path_str(&words)])),
        0
    );
    let mut bytes = fs::read(&words).unwrap();
    bytes[4 * 2500] ^= 1;
    fs::write(&words, &bytes).unwrap();
    let out = bcubic(&["mt", "verify", "--in", path_str(&words)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn mt_scan_mt_source_is_diagonal() {
    let out = bcubic(&["mt", "scan", "--count", "312500", "--source", "mt"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,y_lag,y_n"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() > 400);
    assert!(rows.iter().all(|r| r[1] == r[2]));
}

#[test]
fn mt_scan_cubic_file_spreads() {
    let dir = tempfile::tempdir().unwrap();
    let words = dir.path().join("cubic_words.bin");
    let gen = bcubic(&[
        "generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "1000000", "--format", "words32le", "--out",
        path_str(&words),
    ]);
    assert_eq!(code(&gen), 0);
    assert_eq!(fs::metadata(&words).unwrap().len(), 125_000);
    let out = bcubic(&["mt", "scan", "--source", "file", "--in", path_str(&words)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    let off = rows.iter().filter(|r| r[1] != r[2]).count();
    assert!(off * 10 > rows.len() * 9, "{off} of {} off the diagonal", rows.len());
}

#[test]
fn stats_on_generated_bits_passes() {
    let dir = tempfile::tempdir().unwrap();
    let bits = dir.path().join("bits.bin");
    bcubic(&["generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "1000000", "--out", path_str(&bits)]);
    let out = bcubic(&["stats", "--in", path_str(&bits)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tests"].as_array().unwrap().len(), 7);
    assert_eq!(v["bits"], 1_000_000);
}

#[test]
fn stats_on_zeros_fails() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.bin");
    fs::write(&zeros, vec![0u8; 20_000]).unwrap();
    assert_eq!(code(&bcubic(&["stats", "--in", path_str(&zeros)])), 1);
}

#[test]
fn stats_missing_file_is_usage_error() {
    assert_eq!(code(&bcubic(&["stats", "--in", "/definitely/not/here.bin"])), 2);
    assert_eq!(code(&bcubic(&["stats"])), 2);
}

#[test]
fn stats_reads_other_formats() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["ascii", "csv", "json", "words32le"] {
        let file = dir.path().join(format!("bits.{format}"));
        bcubic(&[
            "generate", "--b", "0", "--c", "2", "--d", "-1", "--bits", "20000", "--format", format, "--out",
            path_str(&file),
        ]);
        let out = bcubic(&["stats", "--in", path_str(&file), "--format", format]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["bits"], 20_000, "{format}");
    }
}

#[test]
fn verify_against_bisection() {
    for (c, d) in [("1", "-1"), ("2", "-1")] {
        let out = bcubic(&["verify", "--b", "0", "--c", c, "--d", d, "--bits", "256"]);
        assert_eq!(code(&out), 0);
    }
}

#[test]
fn verify_flags_corrupted_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.txt");
    bcubic(&[
        "generate", "--b", "0", "--c", "1", "--d", "-1", "--bits", "100", "--checkpoint", path_str(&state),
    ]);
    let good = bcubic(&["verify", "--b", "0", "--c", "1", "--d", "-1", "--bits", "64", "--state", path_str(&state)]);
    assert_eq!(code(&good), 0);

    // swap the state for an admissible triple that is not on this orbit
    let text = fs::read_to_string(&state).unwrap();
    let corrupted: String = text
        .lines()
        .map(|l| if l.starts_with("d ") { "d -1".to_string() } else { l.to_string() })
        .map(|l| if l.starts_with("b ") { "b 0".to_string() } else { l })
        .map(|l| if l.starts_with("c ") { "c 2".to_string() } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(&state, corrupted).unwrap();
    let bad = bcubic(&["verify", "--b", "0", "--c", "1", "--d", "-1", "--bits", "64", "--state", path_str(&state)]);
    assert_eq!(code(&bad), 1);
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("mismatch at bit index"), "{err}");
}
