//! End-to-end CLI checks: every counting method prints the same exact
//! rational, file formats round-trip through the binary, and exit codes
//! distinguish domain errors (1) from usage/parse errors (2).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const P4_GRAPH: &str = "p is 4 3\ne 1 2\ne 2 3\ne 3 4\n";
const P4_EXPR: &str =
    "labels 3\n(e 1 2 (u (r 2 3 (e 1 2 (u (r 1 3 (e 1 2 (u (v 1 1) (v 2 2)))) (v 1 3)))) (v 2 4)))\n";
const C4_GRAPH: &str = "p is 4 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n";
const C6_GRAPH: &str = "p is 6 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 1 6\n";

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().expect("create temp dir"),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).expect("write fixture");
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn iscount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iscount"))
        .args(args)
        .output()
        .expect("run iscount")
}

fn stdout_line(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn arg(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

#[test]
fn all_methods_agree_on_p4() {
    let ws = Workspace::new();
    let graph = ws.file("p4.gr", P4_GRAPH);
    let expr = ws.file("p4.cw", P4_EXPR);
    for method in ["so", "circuit-exact", "circuit-float", "oracle"] {
        let out = iscount(&["count", "--graph", arg(&graph), "--method", method]);
        assert_eq!(stdout_line(&out), "8", "method {method}");
    }
    let out = iscount(&[
        "count",
        "--graph",
        arg(&graph),
        "--method",
        "cwd",
        "--expr",
        arg(&expr),
    ]);
    assert_eq!(stdout_line(&out), "8");
}

#[test]
fn weighted_count_prints_exact_rationals() {
    let ws = Workspace::new();
    let graph = ws.file("c4.gr", C4_GRAPH);
    let weights = ws.file("c4.w", "w 1 2\nw 2 2\nw 3 2\nw 4 2\n");
    for method in ["so", "circuit-exact", "circuit-float", "oracle"] {
        let out = iscount(&[
            "count",
            "--graph",
            arg(&graph),
            "--weights",
            arg(&weights),
            "--method",
            method,
        ]);
        assert_eq!(stdout_line(&out), "17", "method {method}");
    }
    // fractional weights come back as num/den: 1 + 4*(1/2) + 2*(1/4)
    let half = ws.file("half.w", "w 1 1/2\nw 2 1/2\nw 3 1/2\nw 4 1/2\n");
    let out = iscount(&[
        "count",
        "--graph",
        arg(&graph),
        "--weights",
        arg(&half),
        "--method",
        "so",
    ]);
    assert_eq!(stdout_line(&out), "7/2");
}

#[test]
fn coeffs_prints_per_size_counts() {
    let ws = Workspace::new();
    let graph = ws.file("p4.gr", P4_GRAPH);
    let out = iscount(&["coeffs", "--graph", arg(&graph)]);
    assert_eq!(stdout_line(&out), "1 4 3");
}

#[test]
fn verify_and_find_order() {
    let ws = Workspace::new();
    let graph = ws.file("p4.gr", P4_GRAPH);
    let good = ws.file("good.ord", "1 2 3 4\n");
    let out = iscount(&["verify-order", "--graph", arg(&graph), "--order", arg(&good)]);
    assert_eq!(stdout_line(&out), "valid");

    let c6 = ws.file("c6.gr", C6_GRAPH);
    let any = ws.file("any.ord", "1 2 3 4 5 6\n");
    let out = iscount(&["verify-order", "--graph", arg(&c6), "--order", arg(&any)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("invalid "));

    let out = iscount(&["find-order", "--graph", arg(&graph)]);
    let order = stdout_line(&out);
    let roundtrip = ws.file("found.ord", &order);
    let out = iscount(&["verify-order", "--graph", arg(&graph), "--order", arg(&roundtrip)]);
    assert_eq!(stdout_line(&out), "valid");

    let out = iscount(&["find-order", "--graph", arg(&c6)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn circuit_build_and_eval() {
    let ws = Workspace::new();
    let graph = ws.file("p4.gr", P4_GRAPH);
    let order = ws.file("p4.ord", "1 2 3 4\n");
    let circuit = ws.path("p4.circ");
    let out = iscount(&[
        "circuit",
        "build",
        "--graph",
        arg(&graph),
        "--order",
        arg(&order),
        "--out",
        arg(&circuit),
    ]);
    assert!(out.status.success());

    let unit = ws.file("unit.w", "");
    for mode in [&["--exact"][..], &["--float"][..], &[][..]] {
        let mut args = vec![
            "circuit",
            "eval",
            "--circuit",
            arg(&circuit),
            "--weights",
            arg(&unit),
        ];
        args.extend_from_slice(mode);
        let out = iscount(&args);
        assert_eq!(stdout_line(&out), "8", "mode {mode:?}");
    }
}

#[test]
fn cwd_count_standalone() {
    let ws = Workspace::new();
    let expr = ws.file("p4.cw", P4_EXPR);
    let out = iscount(&["cwd", "count", "--expr", arg(&expr)]);
    assert_eq!(stdout_line(&out), "8");

    let weights = ws.file("p4.w", "w 1 0\nw 4 0\n");
    let out = iscount(&["cwd", "count", "--expr", arg(&expr), "--weights", arg(&weights)]);
    // zero weights are allowed on this route: P3 on {2,3} counts 1+1+1=3...
    // with w(1)=w(4)=0 the P4 count collapses to independent sets within {2,3}: {}, {2}, {3}
    assert_eq!(stdout_line(&out), "3");
}

#[test]
fn gen_writes_parseable_instances() {
    let ws = Workspace::new();
    let graph_path = ws.path("gen.gr");
    let out = iscount(&[
        "gen", "--kind", "chain_graph", "--size", "9", "--seed", "5", "--out",
        arg(&graph_path),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&graph_path).unwrap();
    assert!(text.starts_with("p is 9 "));
    let out = iscount(&["count", "--graph", arg(&graph_path), "--method", "so"]);
    let via_so = stdout_line(&out);
    for method in ["oracle", "circuit-exact", "circuit-float"] {
        let out = iscount(&["count", "--graph", arg(&graph_path), "--method", method]);
        assert_eq!(via_so, stdout_line(&out), "method {method}");
    }

    let expr_path = ws.path("gen.cw");
    let out = iscount(&[
        "gen", "--kind", "random_cw_expr", "--size", "6", "--seed", "3", "--out",
        arg(&expr_path),
    ]);
    assert!(out.status.success());
    let out = iscount(&["cwd", "count", "--expr", arg(&expr_path)]);
    let count: i64 = stdout_line(&out).parse().expect("unit-weight count is an integer");
    assert!(count >= 1);
}

#[test]
fn exit_codes_distinguish_domain_and_usage() {
    let ws = Workspace::new();
    // domain: no strong ordering
    let c6 = ws.file("c6.gr", C6_GRAPH);
    let out = iscount(&["count", "--graph", arg(&c6), "--method", "so"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    // usage: malformed graph file
    let bad = ws.file("bad.gr", "p is 2 1\ne 1 7\n");
    let out = iscount(&["count", "--graph", arg(&bad), "--method", "so"]);
    assert_eq!(out.status.code(), Some(2));

    // usage: missing file
    let out = iscount(&["count", "--graph", "/nonexistent.gr", "--method", "so"]);
    assert_eq!(out.status.code(), Some(2));

    // usage: clap rejects unknown method
    let p4 = ws.file("p4.gr", P4_GRAPH);
    let out = iscount(&["count", "--graph", arg(&p4), "--method", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    // domain: expression does not match the graph
    let expr = ws.file("p4.cw", P4_EXPR);
    let out = iscount(&[
        "count", "--graph", arg(&c6), "--method", "cwd", "--expr", arg(&expr),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // usage: cwd without --expr
    let out = iscount(&["count", "--graph", arg(&p4), "--method", "cwd"]);
    assert_eq!(out.status.code(), Some(2));
}
