use std::io::Write;
use std::process::{Command, Output, Stdio};

mod common;

fn ybx(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ybx"))
        .args(args)
        .current_dir(common::manifest_dir())
        .env_remove("YBX_ORACLE_MAX_D")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_example_is_advisory() {
    let o = ybx(&["validate", "examples/so3.alg", "--profile", "lie"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("jacobi (ungraded): 0 violation(s)"));

    let o = ybx(&["validate", "examples/arbitrary_d2.alg", "--format", "json"], "");
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["clean"], false);
    assert_eq!(v["antisymmetry"].as_array().unwrap().len(), 2);
}

#[test]
fn parse_errors_exit_2_with_position() {
    let o = ybx(&["validate"], "algebra a\nbasis X Y\n[X, Z] = Y\n");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("`Z`"), "{err}");
    assert_eq!(ybx(&["verify", "missing.alg"], "").status.code(), Some(2));
}

#[test]
fn ck_pipe_to_latex_matches_golden() {
    let doc = stdout(&ybx(&["ck", "--n", "2", "--symbolic"], ""));
    let o = ybx(&["rmatrix", "--format", "latex"], &doc);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), common::read("tests/golden/so3_r.tex"));
}

#[test]
fn verify_json_record_and_exit_codes() {
    let o = ybx(&["verify", "--format", "json", "--oracle", "examples/so4.alg"], "");
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["lhs_zero"], true);
    assert_eq!(v["oracle_agrees"], true);
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = ybx(&["verify", "tests/fixtures/negative_d2.json"], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn oracle_bound_from_environment() {
    let doc = stdout(&ybx(&["ck", "--n", "3"], ""));
    let mut child = Command::new(env!("CARGO_BIN_EXE_ybx"))
        .args(["verify", "--oracle"])
        .env("YBX_ORACLE_MAX_D", "5")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(doc.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle skipped"));
}

#[test]
fn stats_with_assignment() {
    let o = ybx(
        &[
            "stats",
            "examples/so3.alg",
            "--assign",
            "k1=1,k2=-1",
            "--format",
            "json",
        ],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["rank"].as_u64(), v["zero_rows"].as_u64()), (Some(3), Some(10)));

    let o = ybx(&["stats", "examples/so3.alg"], "");
    assert!(stdout(&o).contains("rank = n/a"));
}

#[test]
fn out_flag_and_matrix_market() {
    let dir = std::env::temp_dir().join(format!("ybx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.mtx");
    let o = ybx(
        &[
            "rmatrix",
            "examples/arbitrary_d2.alg",
            "--format",
            "mm",
            "--out",
            path.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let mm = std::fs::read_to_string(&path).unwrap();
    assert!(mm.contains("\n9 9 6\n"));
    let o = ybx(&["verify", path.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_dir_all(dir).unwrap();

    let o = ybx(&["rmatrix", "examples/so3.alg", "--format", "mm"], "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_is_deterministic() {
    let a = stdout(&ybx(&["ck-scan", "--n", "2", "--format", "json"], ""));
    let b = stdout(&ybx(&["ck-scan", "--n", "2", "--format", "json"], ""));
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("elapsed");
                v.to_string()
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.lines().count(), 9);
}
