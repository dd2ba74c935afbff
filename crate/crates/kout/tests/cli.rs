//! End-to-end checks of the command-line interface: reproducibility of the
//! experiment outputs, schedule independence across worker counts, and the
//! sample/verify round trip.

use std::path::Path;
use std::process::{Command, Output};

fn kout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"experiment":"walkup-pm","n":12,"k":2,"trials":60,"seed":99}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = config.to_str().unwrap();
    stdout_of(&kout(&["experiment", "--config", cfg, "--out", out_a.to_str().unwrap()]));
    stdout_of(&kout(&["experiment", "--config", cfg, "--out", out_b.to_str().unwrap()]));
    assert_eq!(read(out_a.join("trials.csv")), read(out_b.join("trials.csv")));
    assert_eq!(read(out_a.join("report.json")), read(out_b.join("report.json")));
}

#[test]
fn worker_count_only_changes_the_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"experiment":"coupling-tv","n":8,"k":2,"trials":200,"seed":5}"#,
    )
    .unwrap();
    let serial = dir.path().join("serial");
    let parallel = dir.path().join("parallel");
    let cfg = config.to_str().unwrap();
    stdout_of(&kout(&["experiment", "--config", cfg, "--out", serial.to_str().unwrap()]));
    stdout_of(&kout(&[
        "experiment",
        "--config",
        cfg,
        "--out",
        parallel.to_str().unwrap(),
        "--workers",
        "8",
    ]));
    assert_eq!(
        read(serial.join("trials.csv")),
        read(parallel.join("trials.csv"))
    );
    assert_eq!(
        read(serial.join("report.json")),
        read(parallel.join("report.json"))
    );
}

#[test]
fn csv_has_one_row_per_trial_and_the_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"experiment":"fenner-ham","n":14,"k":3,"trials":37,"seed":1}"#,
    )
    .unwrap();
    stdout_of(&kout(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let csv = read(out.join("trials.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 38);
    assert_eq!(
        lines[0],
        "trial,seed,experiment,n,p,k,c,eps,t_target,t_achieved,property,holds,runtime_ms,failure_reason"
    );
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{i},")), "row {i} is in order");
    }
}

#[test]
fn sample_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("sample.txt");
    stdout_of(&kout(&[
        "sample", "--model", "kout", "--n", "16", "--k", "3", "--seed", "4", "--out",
        graph.to_str().unwrap(),
    ]));
    let verdict = stdout_of(&kout(&[
        "verify",
        "--graph",
        graph.to_str().unwrap(),
        "--property",
        "connected",
    ]));
    assert!(verdict.contains("connected: holds"), "got: {verdict}");

    let colored = dir.path().join("colored.txt");
    stdout_of(&kout(&[
        "sample", "--model", "colored", "--n", "8", "--p", "1", "--c", "100", "--seed", "2",
        "--out", colored.to_str().unwrap(),
    ]));
    let verdict = stdout_of(&kout(&[
        "verify",
        "--graph",
        colored.to_str().unwrap(),
        "--property",
        "rainbow",
    ]));
    assert!(verdict.starts_with("rainbow:"), "got: {verdict}");
}

#[test]
fn decompose_writes_parts_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("host.txt");
    let n = 6;
    let mut lines = vec![format!("{} {}", 2 * n, n * n)];
    for u in 0..n {
        for v in n..2 * n {
            lines.push(format!("{u} {v}"));
        }
    }
    std::fs::write(&host, lines.join("\n") + "\n").unwrap();
    let out = dir.path().join("dec");
    let text = stdout_of(&kout(&[
        "decompose",
        "--graph",
        host.to_str().unwrap(),
        "--p",
        "0.9",
        "--k",
        "2",
        "--eps",
        "0.5",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert!(
        text.contains("rainbow parts") || text.contains("fell short"),
        "got: {text}"
    );
    assert!(out.join("h.txt").exists());
    assert!(out.join("remainder.txt").exists());
    let diag: serde_json::Value =
        serde_json::from_str(&read(out.join("diagnostics.json"))).unwrap();
    assert!(diag["t_achieved"].is_number());
    assert!(diag["verified"].is_boolean());
    assert!(diag["diagnostics"]["s"].is_number());
}

#[test]
fn bad_inputs_exit_nonzero() {
    let out = kout(&["experiment", "--preset", "no-such-preset", "--out", "/tmp/unused"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    let out = kout(&["verify", "--graph", "/no/such/file", "--property", "connected"]);
    assert!(!out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"experiment":"pm-packing","n":10,"k":1,"trials":5}"#,
    )
    .unwrap();
    let out = kout(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k >= 2"));
}

#[test]
fn bounds_prints_the_layer_table() {
    let text = stdout_of(&kout(&[
        "bounds", "--k", "2", "--n", "100", "--alpha", "0.5", "--eps", "0.2",
    ]));
    assert!(text.contains("r0 = "));
    assert!(text.contains("mu_r"));
    assert!(text.contains("sum r*mu_r"));
}
