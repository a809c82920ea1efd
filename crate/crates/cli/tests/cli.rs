use std::io::Write;
use std::process::{Command, Stdio};

use middleconv::{canonicalize, SpectralType};
use middleconv_cli::{run_args, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};

fn mcv(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mcv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_rigid_chain() {
    let (code, out, _) = mcv(&["analyze", "411,411,42,33"], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("411,411,42,33: rigid, idx=2, reduction chain 42,411,411,33 -(3)-> 21,111,111 -(1)-> 11,11,11 -(1)-> 1"));
}

#[test]
fn analyze_not_realizable_exits_two() {
    let (code, out, _) = mcv(&["analyze", "22,22,1111"], "");
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("not realizable at 21,21,111"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mcv(&["analyze", "2x,11"], "").0, EXIT_USAGE);
    assert_eq!(mcv(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(mcv(&["enumerate-rigid"], "").0, EXIT_USAGE);
    assert_eq!(mcv(&["analyze"], "").0, EXIT_USAGE);
    assert_eq!(mcv(&["--help"], "").0, EXIT_OK);
}

#[test]
fn basic_list_has_thirteen_lines() {
    let (code, out, _) = mcv(&["enumerate-basic", "-p", "-2"], "");
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 13);
}

#[test]
fn enumerated_lines_round_trip() {
    for args in [["enumerate-rigid", "-n", "7"], ["enumerate-basic", "-p", "-4"]] {
        let (_, out, _) = mcv(&args, "");
        for line in out.lines() {
            let (n, t) = line.split_once(':').unwrap();
            let c = canonicalize(&SpectralType::parse(t).unwrap());
            assert_eq!(c.to_string(), t);
            assert_eq!(c.order().to_string(), n);
        }
    }
}

#[test]
fn stdin_batch_mode() {
    let (code, out, _) = mcv(&["reduce"], "# rigid and not\n6:42,411,411,33\n\n22,22,1111\n");
    assert_eq!(code, EXIT_NEGATIVE);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with("[rigid]"));
    assert!(lines[1].ends_with("[not realizable]"));
    // Enumerator output feeds straight back in.
    let (_, listing, _) = mcv(&["enumerate-rigid", "-n", "4"], "");
    let (code, out, _) = mcv(&["analyze"], &listing);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.matches(": rigid,").count(), 6);
}

#[test]
fn mismatched_order_prefix_is_rejected() {
    let (code, _, err) = mcv(&["analyze", "5:11,11,11"], "");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("prefix says order 5"));
}

#[test]
fn diagrams() {
    let (_, out, _) = mcv(&["diagram", "33,222,111111"], "");
    assert!(out.contains("2 ─ 4 ─ 6 ─ 5 ─ 4 ─ 3 ─ 2 ─ 1\n        │\n        3\n"));
    let (_, out, _) = mcv(&["diagram", "11,11,11,11"], "");
    assert!(out.contains("1 ─ 2 ─ 1\n    ├───┐\n    1   1\n"));
    let (_, dot, _) = mcv(&["diagram", "--dot", "1"], "");
    assert_eq!(dot, "graph alpha {\n  node [shape=circle];\n  a0 [label=\"1\", style=dotted];\n}\n");
}

#[test]
fn decompose_and_connect() {
    let (code, out, _) = mcv(&["decompose", "1111,31,1111"], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("1111,31,1111: 4 rigid decompositions"));
    let out = run_args(["connect", "11,11,11"], "");
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("hypergeometric parameters: Γ(b1)·Γ(b2) / (Γ(a1)·Γ(a2))"));
    // Not rigid: a domain verdict.
    assert_eq!(run_args(["decompose", "111,111,111"], "").code, EXIT_NEGATIVE);
}

#[test]
fn mc_demo_is_reproducible() {
    let a = run_args(["mc-demo", "21,111,111", "--seed", "4"], "");
    let b = run_args(["mc-demo", "21,111,111", "--seed", "4"], "");
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a, b);
    assert!(a.stdout.contains("spectral data as predicted"));
    assert_eq!(run_args(["mc-demo", "111,111,111"], "").code, EXIT_NEGATIVE);
}

#[test]
fn counts_table() {
    let out = run_args(["counts", "-n", "6", "-p", "-2", "--threads", "1"], "");
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("  6        13     28\n"));
    assert!(out.stdout.contains(" -2     13"));
}

#[test]
fn max_order_is_enforced() {
    assert_eq!(run_args(["enumerate-rigid", "-n", "15"], "").code, EXIT_USAGE);
    assert_eq!(run_args(["enumerate-rigid", "-n", "15", "--max-order", "15"], "").code, EXIT_OK);
}
