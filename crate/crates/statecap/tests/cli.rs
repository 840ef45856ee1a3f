//! End-to-end checks of the command-line interface: output layout, CSV
//! schema, and exit codes.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_statecap"))
}

fn write_spec(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(text.as_bytes()).unwrap();
    path
}

const SZ_HALF_WITH_SIDE: &str = "\
x 2
y 2
s 2
channel
1/2 1/2
1 0
0 1
1/2 1/2
state
1/2 1/2
side 3
0.7 0 0.3
0 0.7 0.3
";

#[test]
fn capacity_prints_all_values() {
    let dir = std::env::temp_dir();
    let spec = write_spec(&dir, "statecap_cli_capacity.chan", SZ_HALF_WITH_SIDE);
    let output = bin().arg("capacity").arg(&spec).arg("--bits").output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("C_lower"), "{stdout}");
    assert!(stdout.contains("C_causal"));
    assert!(stdout.contains("C_probing"));
    assert!(stdout.contains("C_upper"));
    assert!(stdout.contains("bits"));
    // The side channel sits past the collapse threshold, so the causal value
    // matches the no-side-information one.
    assert!(stdout.contains("C_lower  (no side info) = 0.215761554339"));
    assert!(stdout.contains("C_causal (noisy causal) = 0.2157615"));
}

#[test]
fn sweep_emits_stable_csv() {
    let output = bin()
        .args(["sweep", "fig3", "--grid", "5"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = String::from_utf8(output.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,value,C_lower,C_causal,C_probing,C_upper"
    );
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("param"));
    let again = bin()
        .args(["sweep", "fig3", "--grid", "5"])
        .output()
        .unwrap();
    assert_eq!(csv, String::from_utf8(again.stdout).unwrap(), "byte-stable");
}

#[test]
fn sweep_writes_file_with_out_flag() {
    let path = std::env::temp_dir().join("statecap_cli_fig4.csv");
    let _ = std::fs::remove_file(&path);
    let output = bin()
        .args(["sweep", "fig4", "--grid", "5", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("param,value,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn custom_sweep_uses_spec() {
    let dir = std::env::temp_dir();
    let spec = write_spec(&dir, "statecap_cli_custom.chan", SZ_HALF_WITH_SIDE);
    let output = bin()
        .args(["sweep", "custom", "--family", "symmetric", "--grid", "3", "--spec"])
        .arg(&spec)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = String::from_utf8(output.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("q,"));
}

#[test]
fn thresholds_reports_the_four_values() {
    let dir = std::env::temp_dir();
    let spec = write_spec(&dir, "statecap_cli_thresholds.chan", SZ_HALF_WITH_SIDE);
    let output = bin().arg("thresholds").arg(&spec).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("underline_epsilon = 0.1002780"), "{stdout}");
    assert!(stdout.contains("underline_q       = 0.0370712"));
    assert!(stdout.contains("overline_epsilon  = 0.800000000000"));
    assert!(stdout.contains("overline_q        = 0.400000000000"));
    assert!(stdout.contains("interior-root"));
    assert!(stdout.contains("verdict,Prop1,true"));
}

#[test]
fn check_emits_machine_rows_and_assert_code() {
    let dir = std::env::temp_dir();
    let spec = write_spec(&dir, "statecap_cli_check.chan", SZ_HALF_WITH_SIDE);
    let output = bin().arg("check").arg(&spec).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    for key in ["Thm1", "Thm1v", "Thm2", "Thm2v", "Thm2alt", "Prop1", "Prop2", "Prop3"] {
        assert!(stdout.contains(&format!("verdict,{key},")), "missing {key}");
    }
    // The side channel violates the collapse conditions, so --assert fails.
    let output = bin().arg("check").arg(&spec).arg("--assert").output().unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn degrade_verdicts_and_exit_codes() {
    let output = bin().args(["degrade", "bsc:0.2", "bec:0.4"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("degraded = true"));
    assert!(stdout.contains("witness"));

    let output = bin()
        .args(["degrade", "bec:0.2", "bsc:0.3", "--assert"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));

    let output = bin().args(["degrade", "ge:0.7:3", "ge:0.3:3"]).output().unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout).unwrap().contains("degraded = true"));
}

#[test]
fn parse_errors_exit_with_code_two() {
    let dir = std::env::temp_dir();
    let spec = write_spec(&dir, "statecap_cli_bad.chan", "x 2\ny 2\n");
    let output = bin().arg("capacity").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());

    let bad_row = SZ_HALF_WITH_SIDE.replace("1/2 1/2\n1 0", "0.5 0.4\n1 0");
    let spec = write_spec(&dir, "statecap_cli_bad_row.chan", &bad_row);
    let output = bin().arg("capacity").arg(&spec).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("line 5"), "{stderr}");
}

#[test]
fn spec_without_side_skips_observation_capacities() {
    let dir = std::env::temp_dir();
    let no_side = "\
x 2
y 2
s 2
channel
1/2 1/2
1 0
0 1
1/2 1/2
state
1/2 1/2
";
    let spec = write_spec(&dir, "statecap_cli_noside.chan", no_side);
    let output = bin().arg("capacity").arg(&spec).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("C_lower"));
    assert!(stdout.contains("skipping C_causal"));
    assert!(!stdout.contains("C_probing ="));
}
