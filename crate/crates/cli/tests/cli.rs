//! End-to-end runs of the binary: outputs, exit codes and determinism.

use std::io::Write;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lefschetz")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn class_prints_gaussian_binomial() {
    let out = run(&["class", "G(2,5)", "--q", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("L^9"), "{text}");
    assert!(text.contains("1395"), "{text}");
}

#[test]
fn classic_on_fermat_holds() {
    let out = run(&["verify-classic", "--variety", &fixture("fermat3.var"), "--e", "1,2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = &v["entries"];
    assert_eq!((e[0]["sym2"].as_i64(), e[0]["hilb2"].as_i64()), (Some(47), Some(61)));
    assert_eq!((e[1]["points"].as_i64(), e[1]["lines"].as_i64()), (Some(45), Some(27)));
    assert_eq!(v["all_hold"], true);
}

#[test]
fn extended_on_ci_exits_zero() {
    let out = run(&["verify-extended", "--variety", &fixture("ci22_f2.var"), "--params", "5,3,4,0", "--e", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn out_of_bound_probe_exits_one() {
    let (f2, f3) = (fixture("ci22_f2.var"), fixture("ci22_f3.var"));
    let out = run(&[
        "probe", "--variety", &f2, "--variety", &f3, "--variety", &f2, "--e", "1,1,2", "--params", "5,3,4,0",
    ]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify-classic", "--e", "1"])), 2);
    assert_eq!(code(&run(&["verify-extended", "--variety", &fixture("ci22_f2.var"), "--e", "1"])), 2);
    assert_eq!(code(&run(&["count", "--variety", &fixture("fermat3.var"), "--e", "1", "--bogus"])), 2);
    assert_eq!(code(&run(&["class", "G(5,2)"])), 2);
    let f = fixture("fermat3.var");
    assert_eq!(code(&run(&["probe", "--variety", &f, "--variety", &f, "--e", "1,2,3"])), 2);
    // The conic sits outside the parameter restrictions unless a regime is forced.
    let conic = fixture("conic_p3.var");
    assert_eq!(code(&run(&["verify-partition", "--variety", &conic, "--params", "3,1,2,0", "--e", "1"])), 2);
}

#[test]
fn probe_with_one_field_exits_two() {
    let out = run(&["probe", "--variety", &fixture("fermat3.var"), "--e", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3"));
}

#[test]
fn singular_cubic_is_rejected() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "field 2 1\nambient 3\nform x0^3 + x1^3 + x2^3").unwrap();
    let out = run(&["verify-classic", "--variety", f.path().to_str().unwrap(), "--e", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn excluded_plane_exits_three() {
    let conic = fixture("conic_p3.var");
    let out =
        run(&["verify-partition", "--variety", &conic, "--params", "3,1,2,0", "--regime", "low", "--e", "1"]);
    assert_eq!(code(&out), 3, "{}", stdout(&out));
    assert!(!stdout(&out).is_empty(), "report is still emitted");
}

#[test]
fn unreadable_variety_exits_four() {
    assert_eq!(code(&run(&["count", "--variety", &fixture("corrupt.var"), "--e", "1"])), 4);
    assert_eq!(code(&run(&["count", "--variety", "/nonexistent/y.var", "--e", "1"])), 4);
}

#[test]
fn reports_do_not_depend_on_workers() {
    let ci = fixture("ci22_f2.var");
    let args = |w: &'static str| {
        vec!["verify-extended", "--variety", ci.as_str(), "--params", "5,3,4,0", "--e", "1", "--format", "json", "--workers", w]
    };
    let one = run(&args("1"));
    let four = run(&args("4"));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, run(&args("1")).stdout);
    assert!(String::from_utf8_lossy(&four.stderr).contains("workers: 4"));
}

#[test]
fn csv_carries_schema_tag() {
    let out = run(&["verify-partition", "--variety", &fixture("fermat3.var"), "--params", "3,2,3,1", "--regime", "low", "--e", "1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("# schema: lefschetz-"), "{}", stdout(&out));
}
