//! End-to-end checks of the `pqbc` binary: exit codes, determinism and
//! output formats.

use pqbc::cipher::{CipherParams, IdealCipher};
use pqbc::modes::{cbc_mac, Message};
use serde_json::Value;
use std::process::{Command, Output};

fn pqbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqbc")).args(args).env_remove("PQBC_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

const DISTINGUISH: &[&str] = &[
    "experiment",
    "distinguishing",
    "--construction",
    "lrw",
    "--distinguisher",
    "birthday",
    "--m",
    "8",
    "--n",
    "8",
    "--qc",
    "16",
    "--trials",
    "300",
];

#[test]
fn bounds_value_and_exit_code() {
    let v = json(&pqbc(&["bounds", "fx", "--m", "12", "--n", "12", "--qc", "4", "--qq", "16"]));
    let text = v.to_string();
    assert!(text.contains("0.03125572519103182"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bounds", "fx", "--m", "12", "--n", "12", "--qc", "-1", "--qq", "1"][..],
        &["bounds", "fx", "--m", "12", "--n", "12", "--qc", "8192", "--qq", "1"],
        &["no-such-command"],
        &["attack", "birthday", "--planted", "nothing"],
        &["--seed", "not-a-number", "bounds", "fx", "--m", "8", "--n", "8", "--qc", "1", "--qq", "1"],
    ] {
        assert_eq!(pqbc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let a = pqbc(&[&["--seed", "7", "--threads", "1"], DISTINGUISH].concat());
    let b = pqbc(&[&["--seed", "7", "--threads", "4"], DISTINGUISH].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "thread count must not change results");

    let env = Command::new(env!("CARGO_BIN_EXE_pqbc"))
        .args(&[&["--threads", "2"], DISTINGUISH].concat())
        .env("PQBC_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, env.stdout, "PQBC_SEED matches --seed");

    let other = pqbc(&[&["--seed", "8"], DISTINGUISH].concat());
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let to_stdout = pqbc(&[&["--seed", "3"], DISTINGUISH].concat());
    let to_file = pqbc(&[&["--seed", "3", "--out", path.to_str().unwrap()], DISTINGUISH].concat());
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn csv_has_one_row_per_grid_point() {
    let out = pqbc(&["--format", "csv", "bounds", "lrw-general", "--m", "8", "--n", "8", "--qc", "1,2,2^3", "--qq", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("m,n,q_c,q_q,formula_id,value"));
    assert!(lines[1].contains("0.0078125"));
}

#[test]
fn mode_mac_matches_library() {
    let v = json(&pqbc(&["--seed", "99", "mode", "cbc", "mac", "--n", "8", "--key", "5", "--msg", "1,2,3"]));
    let e = IdealCipher::new(CipherParams::new(8, 8, 99)).unwrap();
    let want = cbc_mac(&e, 5, &Message::from_blocks(8, vec![1, 2, 3]).unwrap()).unwrap();
    assert_eq!(v["tag"].as_u64(), Some(want));
}

#[test]
fn gcm_open_checks_the_tag() {
    let common = ["--key", "3", "--nonce", "5", "--aad", "9"];
    let sealed = json(&pqbc(&[&["mode", "gcm", "seal", "--msg", "1,2,3"], &common[..]].concat()));
    let ct: Vec<String> = sealed["ciphertext"].as_array().unwrap().iter().map(|c| c.to_string()).collect();
    let ct = ct.join(",");
    let tag = sealed["tag"].as_u64().unwrap();

    let good = tag.to_string();
    let opened = json(&pqbc(&[&["mode", "gcm", "open", "--ct", &ct, "--tag", &good], &common[..]].concat()));
    assert!(opened.to_string().contains("[1,2,3]"), "{opened}");

    let bad = (tag ^ 1).to_string();
    let rejected = pqbc(&[&["mode", "gcm", "open", "--ct", &ct, "--tag", &bad], &common[..]].concat());
    assert_eq!(rejected.status.code(), Some(1));
}

#[test]
fn verify_hybrids_passes() {
    let v = json(&pqbc(&["verify-hybrids", "--construction", "fx", "--m", "8", "--n", "8", "--j", "4", "--count", "50"]));
    assert!(v.is_object());
}
