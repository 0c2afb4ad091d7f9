//! End-to-end runs of the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mse_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mse"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("mse-cli-test-{}-{}", std::process::id(), name));
    p
}

fn write_tmp(name: &str, content: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, content).unwrap();
    p
}

const SINGLE_EDGE_P2_K1: &str = "p mse 2 1 1 2 2 1\ne 1 2\n";
const FOUR_CYCLE_P3: &str = "p mse 4 4 1 3 3 2\ne 1 2\ne 2 3\ne 3 4\ne 4 1\n";

#[test]
fn solve_reports_the_optimum() {
    let inst = write_tmp("solve.mse", SINGLE_EDGE_P2_K1);
    let out = mse(&["solve", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "min_shared=1");
}

#[test]
fn decision_bound_drives_answer_and_exit_code() {
    let inst = write_tmp("decide.mse", SINGLE_EDGE_P2_K1);
    let yes = mse(&["solve", inst.to_str().unwrap(), "-k", "1"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout(&yes).trim(), "answer=yes");
    let no = mse(&["solve", inst.to_str().unwrap(), "-k", "0"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(stdout(&no).trim(), "answer=no");
}

#[test]
fn oracle_methods_agree_on_the_cycle() {
    let inst = write_tmp("cycle.mse", FOUR_CYCLE_P3);
    for method in ["contraction", "paths", "searchtree"] {
        let out = mse(&["oracle", inst.to_str().unwrap(), "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        assert_eq!(stdout(&out).trim(), "min_shared=2", "{method}");
    }
}

#[test]
fn parse_errors_exit_two_with_line_numbers() {
    let bad = write_tmp("bad.mse", "p mse 2 2 1 2 2 1\ne 1 2\n");
    let out = mse(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let selfloop = write_tmp("loop.mse", "p mse 2 1 1 2 2 1\ne 1 1\n");
    let out = mse(&["solve", selfloop.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn work_bound_exit_is_three() {
    let inst = write_tmp("bound.mse", FOUR_CYCLE_P3);
    let out = mse_env(
        &["oracle", inst.to_str().unwrap(), "--method", "contraction"],
        "MSE_WORK_BOUND",
        "2",
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn routing_roundtrip_through_verify() {
    let inst = write_tmp("roundtrip.mse", FOUR_CYCLE_P3);
    let routing = tmp("roundtrip.routing");
    let out = mse(&[
        "solve",
        inst.to_str().unwrap(),
        "--emit-routing",
        routing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "min_shared=2");
    let out = mse(&[
        "verify",
        inst.to_str().unwrap(),
        "--routing",
        routing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "valid shared=2");
}

#[test]
fn verify_rejects_tampered_routing() {
    let inst = write_tmp("tamper.mse", FOUR_CYCLE_P3);
    let routing = write_tmp(
        "tamper.routing",
        "routing 3\n1 2 3\n1 2 3\n1 2 3\nshared 1\n",
    );
    let out = mse(&[
        "verify",
        inst.to_str().unwrap(),
        "--routing",
        routing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("invalid"));
}

#[test]
fn emitted_decomposition_feeds_back_into_solve() {
    let inst = write_tmp("tdflow.mse", FOUR_CYCLE_P3);
    let td = tmp("tdflow.td");
    let out = mse(&["td", inst.to_str().unwrap(), "-o", td.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = mse(&[
        "solve",
        inst.to_str().unwrap(),
        "--td",
        td.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "min_shared=2");
}

#[test]
fn solve_fpt_agrees_with_solve() {
    let inst = write_tmp("fpt.mse", FOUR_CYCLE_P3);
    let direct = mse(&["solve", inst.to_str().unwrap()]);
    let piped = mse(&["solve-fpt", inst.to_str().unwrap()]);
    assert_eq!(stdout(&direct), stdout(&piped));
}

#[test]
fn weighted_solve_uses_weights() {
    let weighted = write_tmp(
        "weighted.mse",
        "p mse 4 4 1 3 3 2\ne 1 2 5\ne 2 3 5\ne 3 4\ne 4 1\n",
    );
    let out = mse(&["solve", weighted.to_str().unwrap(), "--weighted"]);
    assert_eq!(stdout(&out).trim(), "min_shared=2");
    let out = mse(&[
        "oracle",
        weighted.to_str().unwrap(),
        "--method",
        "contraction",
        "--weighted",
    ]);
    assert_eq!(stdout(&out).trim(), "min_shared=2");
}

#[test]
fn generators_write_instance_and_report() {
    let out_path = tmp("gen-sc.mse");
    let out = mse(&[
        "gen",
        "setcover",
        "--universe",
        "3",
        "--set",
        "1,2",
        "--set",
        "1",
        "--set",
        "2,3",
        "--ell",
        "2",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(format!("{}.report", out_path.display())).unwrap();
    assert!(report.contains("p=8"), "{report}");
    assert!(report.contains("k=2"));
    // The generated file parses back and the header route count matches.
    let solved = mse(&[
        "oracle",
        out_path.to_str().unwrap(),
        "--method",
        "contraction",
        "-k",
        "2",
    ]);
    assert_eq!(solved.status.code(), Some(0));
    assert_eq!(stdout(&solved).trim(), "answer=yes");
}

#[test]
fn random_generation_is_seed_deterministic() {
    let a = tmp("rand-a.mse");
    let b = tmp("rand-b.mse");
    for path in [&a, &b] {
        let out = mse(&[
            "gen",
            "random",
            "--n",
            "7",
            "--extra",
            "3",
            "--p",
            "2",
            "--seed",
            "9",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
}

#[test]
fn bundled_catalog_agreement() {
    // Both solvers and all three oracle methods agree on every bundled
    // instance file.
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    let mut checked = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("mse") {
            continue;
        }
        let file = path.to_str().unwrap();
        let reference = stdout(&mse(&["solve", file]));
        assert!(reference.starts_with("min_shared="), "{file}: {reference}");
        let fpt = stdout(&mse(&["solve-fpt", file]));
        assert_eq!(fpt, reference, "{file}: pipeline disagrees");
        for method in ["contraction", "paths", "searchtree"] {
            let got = stdout(&mse(&["oracle", file, "--method", method]));
            assert_eq!(got, reference, "{file}: {method} disagrees");
        }
        checked += 1;
    }
    assert!(
        checked >= 6,
        "expected the bundled instances, found {checked}"
    );
}

#[test]
fn infeasible_instances_exit_one() {
    let inst = write_tmp("disc.mse", "p mse 4 2 1 4 2 0\ne 1 2\ne 3 4\n");
    let out = mse(&["solve", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "min_shared=inf");
}
