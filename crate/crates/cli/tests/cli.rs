//! End-to-end tests of the `ruin` binary: output formats, exit codes and
//! simulation determinism.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn chain_file(contents: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().unwrap();
    file.write_all(contents.as_bytes()).unwrap();
    file
}

fn sym3() -> NamedTempFile {
    chain_file(r#"{"kind":"gambler","p":["0","1/2","1/2","0"],"q":["0","1/2","1/2","0"]}"#)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn gambler_ew_prints_exact_fraction() {
    let file = sym3();
    let path = file.path().to_str().unwrap();
    let out = run(&["gambler", "ew", "--chain", path, "--j", "0", "--i", "1", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"exact\":\"8/3\""), "{text}");
    assert!(text.contains("\"approx\":\"2.6666666666666666667\""), "{text}");
}

#[test]
fn rho_from_the_losing_barrier_is_zero() {
    let file = sym3();
    let path = file.path().to_str().unwrap();
    let out = run(&["gambler", "rho", "--chain", path, "--j", "0", "--i", "0", "--k", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"exact\":\"0\""));
}

#[test]
fn methods_agree_and_formats_share_exact_strings() {
    let file = chain_file(
        r#"{"kind":"gambler","p":["0","2/5","1/3","1/7","0"],"q":["0","1/5","1/3","2/7","0"]}"#,
    );
    let path = file.path().to_str().unwrap();
    let base: &[&str] = &["gambler", "ew", "--chain", path, "--j", "0", "--i", "2", "--k", "4"];
    let closed = run(&[base, &["--method", "closed"]].concat());
    let recurrence = run(&[base, &["--method", "recurrence"]].concat());
    let oracle = run(&[base, &["--method", "oracle"]].concat());
    assert_eq!(stdout(&closed), stdout(&recurrence));
    assert_eq!(stdout(&closed), stdout(&oracle));
    let json = stdout(&closed);
    let csv = stdout(&run(&[base, &["--format", "csv"]].concat()));
    let exact = json.split("\"exact\":\"").nth(1).unwrap().split('"').next().unwrap();
    assert!(csv.contains(exact), "csv {csv} lacks exact {exact}");
}

#[test]
fn conditional_from_its_own_barrier_exits_2() {
    let file = sym3();
    let path = file.path().to_str().unwrap();
    let out = run(&["gambler", "ew", "--chain", path, "--j", "0", "--i", "0", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["gambler", "eb", "--chain", path, "--j", "0", "--i", "3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["gambler", "ew", "--chain", path, "--j", "0", "--i", "0", "--k", "3", "--method", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_chains_and_indices_exit_2() {
    let file = chain_file(r#"{"kind":"gambler","p":["0","1","0"],"q":["0","1","0"]}"#);
    let path = file.path().to_str().unwrap();
    let out = run(&["gambler", "rho", "--chain", path, "--j", "0", "--i", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let file = sym3();
    let path = file.path().to_str().unwrap();
    let out = run(&["gambler", "rho", "--chain", path, "--j", "2", "--i", "1", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["gambler", "rho", "--chain", "/nonexistent.json", "--j", "0", "--i", "1", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn polygon_commands_cover_the_regression_values() {
    let file = chain_file(r#"{"kind":"polygon","p":["1/2","1/2","1/2"],"q":["1/2","1/2","1/2"]}"#);
    let path = file.path().to_str().unwrap();
    let out = run(&["polygon", "ev", "--chain", path, "--i", "0"]);
    assert!(stdout(&out).contains("\"exact\":\"3\""));
    let out = run(&["polygon", "er", "--chain", path, "--i", "0"]);
    assert!(stdout(&out).contains("\"exact\":\"2\""));
    let sympoly3 = chain_file(
        r#"{"kind":"polygon","p":["1/2","1/2","1/2","1/2"],"q":["1/2","1/2","1/2","1/2"]}"#,
    );
    let path3 = sympoly3.path().to_str().unwrap();
    let out = run(&["polygon", "lij", "--chain", path3, "--i", "0"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert_eq!(text.matches("\"exact\":\"1/3\"").count(), 3);
    // j = i is a usage error
    let out = run(&["polygon", "lij", "--chain", path3, "--i", "0", "--j", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["polygon", "evij", "--chain", path3, "--i", "1", "--j", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_is_byte_identical_across_worker_counts() {
    let file = sym3();
    let path = file.path().to_str().unwrap();
    let base: &[&str] = &[
        "simulate", "gambler", "--chain", path, "--j", "0", "--i", "1", "--k", "3",
        "--trials", "200000", "--seed", "7",
    ];
    let one = run(&[base, &["--workers", "1"]].concat());
    let eight = run(&[base, &["--workers", "8"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
    assert!(!one.stdout.is_empty());
}

#[test]
fn conjecture_subcommand_emits_the_report_shape() {
    let file = chain_file(
        r#"{"kind":"gambler","p":["0","1/3","1/3","0"],"q":["0","1/6","1/6","0"]}"#,
    );
    let path = file.path().to_str().unwrap();
    let out = run(&[
        "simulate", "conjecture", "--chain", path, "--i", "1", "--trials", "20000", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for field in ["conjecture_probe", "base", "swapped", "ks_distance"] {
        assert!(text.contains(field), "missing {field} in {text}");
    }
}

#[test]
fn verify_command_passes_on_a_correct_build() {
    let out = run(&["verify", "--random-chains", "25", "--max-n", "8", "--seed", "99"]);
    assert!(out.status.success(), "verify failed: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("three-path-agreement"));
    assert!(text.contains("total-expectation"));
    assert!(text.contains("pass"));
    assert!(!text.contains("FAIL"));
}
