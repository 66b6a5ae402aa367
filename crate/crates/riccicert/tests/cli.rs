//! End-to-end checks of the command-line interface: exit codes, byte-level
//! determinism of emitted certificates, and the check-cert round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_riccicert")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary must run")
}

fn tmpfile(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("riccicert-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn bp_order_prints_28() {
    let out = run(&["bp-order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "28");
    assert_eq!(String::from_utf8_lossy(&run(&["bp-order", "5"]).stdout).trim(), "130816");
}

#[test]
fn lens_search_exit_codes() {
    // no admissible tuple mod 3: empty list, exit 1
    let out = run(&["lens-search", "3", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"admissible\": []"));
    // mod 5 finds (1,1,2,2): exit 0
    let out = run(&["lens-search", "5", "2"]);
    assert_eq!(out.status.code(), Some(0));
    // budget exhaustion: exit 2 (partial)
    let out = run(&["lens-search", "5", "2", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lens_check_exit_codes() {
    assert_eq!(run(&["lens-check", "5", "1", "1", "2", "2"]).status.code(), Some(0));
    assert_eq!(run(&["lens-check", "3", "1", "1", "2", "2"]).status.code(), Some(1));
    // even modulus is a usage-level error
    assert_eq!(run(&["lens-check", "4", "1", "1"]).status.code(), Some(64));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["bp-order"]).status.code(), Some(64));
    // grid below the minimum
    let out = run(&["verify-drup", "--fixture", "builtin:s5", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(64));
    // missing fixture file
    let out = run(&["verify-drup", "--fixture", "/nonexistent/fixture.json"]);
    assert_eq!(out.status.code(), Some(64));
    // help is not a usage error
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn components_runs() {
    let out = run(&[
        "components", "--k", "2", "--c", "1", "--s0", "0", "--q-range=-2..2", "--m", "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"b_k\""));
    assert!(text.contains("28"));
}

#[test]
fn genus_reads_numbers_file() {
    let path = tmpfile("k3.json");
    std::fs::write(&path, r#"{"k":1,"numbers":{"1":-48}}"#).unwrap();
    let out = run(&["genus", "--series", "ahat", "--numbers", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"genus\": \"2/1\""));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn verify_path_deterministic_and_recheckable() {
    let out1 = tmpfile("path1.json");
    let out2 = tmpfile("path2.json");
    let base = [
        "verify-path",
        "--fixture",
        "builtin:s5",
        "--stage",
        "full",
        "--grid",
        "96",
        "--lambda-grid",
        "16",
        "--mode",
        "heuristic",
    ];
    let mut args1: Vec<&str> = base.to_vec();
    args1.extend(["--threads", "1", "--out", out1.to_str().unwrap()]);
    let mut args2: Vec<&str> = base.to_vec();
    args2.extend(["--threads", "4", "--out", out2.to_str().unwrap()]);
    assert_eq!(run(&args1).status.code(), Some(0));
    assert_eq!(run(&args2).status.code(), Some(0));
    let text1 = std::fs::read(&out1).unwrap();
    let text2 = std::fs::read(&out2).unwrap();
    assert_eq!(text1, text2, "certificates must be byte-identical across thread counts");

    // the hidden round-trip subcommand re-executes the embedded config
    let out = run(&["check-cert", out1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // tampering must be detected
    let tampered = String::from_utf8(text2).unwrap().replace("\"grid_min\": ", "\"grid_min\": 9");
    std::fs::write(&out2, tampered).unwrap();
    assert_eq!(run(&["check-cert", out2.to_str().unwrap()]).status.code(), Some(1));

    let _ = std::fs::remove_file(&out1);
    let _ = std::fs::remove_file(&out2);
}

#[test]
fn verify_drup_round_fixture() {
    let out = run(&["verify-drup", "--fixture", "builtin:round-s5", "--grid", "128"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"verdict\": \"Verified\""));
}

#[test]
fn glue_check_files() {
    let left = tmpfile("glue-left.json");
    let right = tmpfile("glue-right.json");
    std::fs::write(&left, r#"{"params":[0.0,0.5,1.0],"blocks":[["b",[1.0,1.0,1.0]]]}"#).unwrap();
    std::fs::write(&right, r#"{"params":[0.0,0.5,1.0],"blocks":[["b",[-0.5,-0.5,-0.5]]]}"#)
        .unwrap();
    let out = run(&["glue-check", "--left", left.to_str().unwrap(), "--right", right.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // totally geodesic against itself fails
    std::fs::write(&right, r#"{"params":[0.0,0.5,1.0],"blocks":[["b",[0.0,0.0,0.0]]]}"#).unwrap();
    std::fs::write(&left, r#"{"params":[0.0,0.5,1.0],"blocks":[["b",[0.0,0.0,0.0]]]}"#).unwrap();
    let out = run(&["glue-check", "--left", left.to_str().unwrap(), "--right", right.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = std::fs::remove_file(&left);
    let _ = std::fs::remove_file(&right);
}

#[test]
fn classify_boundary_file() {
    let fam = tmpfile("family.json");
    std::fs::write(
        &fam,
        r#"{"members":[{"nu":0.0,"round_radius":1.0,"round_deviation":0.0,"min_principal":0.8}]}"#,
    )
    .unwrap();
    let out = run(&["classify-boundary", "--family", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"Core\""));
    let _ = std::fs::remove_file(&fam);
}

#[test]
fn verify_disk_smoke() {
    let out = run(&["verify-disk", "--n", "2", "--m", "4", "--rho", "0.1", "--c", "0.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"overall\": \"Verified\""));
}

#[test]
fn config_file_precedence() {
    let cfg = tmpfile("config.json");
    std::fs::write(&cfg, r#"{"grid": 4}"#).unwrap();
    // config grid of 4 violates the minimum: usage error
    let out = run(&[
        "verify-drup",
        "--fixture",
        "builtin:round-s5",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(64));
    // CLI flag overrides the config file
    let out = run(&[
        "verify-drup",
        "--fixture",
        "builtin:round-s5",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let _ = std::fs::remove_file(&cfg);
}
