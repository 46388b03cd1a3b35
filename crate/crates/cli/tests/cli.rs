use std::io::Write;
use std::process::Command;

use markbracket::{
    bracket, build_universe, euler_system, interlacement_graph, kauffman_oracle, parse_gauss_code,
    parse_marked_graph,
};
use markbracket_cli::run;
use tempfile::NamedTempFile;

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("markbracket").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn bracket_single_vertex() {
    let f = file("vertex 0\n");
    assert_eq!(call(&["bracket", path(&f)]), (0, "A*d + B\n".into(), String::new()));
}

#[test]
fn jones_empty_graph() {
    let f = file("");
    let (code, out, _) = call(&["jones", path(&f)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("1"));
}

#[test]
fn oracle_positive_hopf() {
    let f = file("1 2 / 1 2 signs 1+ 2+\n");
    assert_eq!(call(&["oracle", path(&f)]).1, "A^2*d + 2*A*B + B^2*d\n");
}

#[test]
fn jones_prints_both_notations() {
    let f = file("graph hopf\nvertex 1 mark c\nvertex 2\nedge 1 2\n");
    let (code, out, _) = call(&["jones", path(&f)]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "hopf:");
    assert!(lines[2].contains('t'), "{out}");
    let (_, tsv, _) = call(&["--format", "tsv", "jones", path(&f)]);
    assert_eq!(tsv.lines().count(), 1);
    assert_eq!(tsv.split('\t').count(), 3);
}

#[test]
fn interlace_then_bracket_matches_oracle() {
    let code_text = "1 2 3 1 / 2 3 / O signs 1+ 2- 3-\n";
    let f = file(code_text);
    let oracle = kauffman_oracle(&parse_gauss_code(code_text).unwrap()).unwrap();
    for seed in 0..6 {
        let (code, out, err) = call(&["interlace", "--euler-seed", &seed.to_string(), path(&f)]);
        assert_eq!(code, 0, "{err}");
        let g = parse_marked_graph(&out).unwrap();
        assert_eq!(bracket(&g), oracle);
        let gf = file(&out);
        assert_eq!(call(&["bracket", path(&gf)]).1.trim(), oracle.to_string());
    }
    let u = build_universe(&parse_gauss_code(code_text).unwrap());
    let default = interlacement_graph(&u, &euler_system(&u)).unwrap();
    assert_eq!(parse_marked_graph(&call(&["interlace", path(&f)]).1).unwrap(), default);
}

#[test]
fn graph_operations() {
    let f = file("vertex 0 mark u\nvertex 1\nvertex 2 loop\nedge 0 1\nedge 0 2\n");
    let (code, out, _) = call(&["complement", path(&f), "--vertex", "0"]);
    assert_eq!(code, 0);
    let g = parse_marked_graph(&out).unwrap();
    assert!(g.adjacent(1, 2).unwrap());
    let (code, out, _) = call(&["pivot", path(&f), "--vertex", "0", "1"]);
    assert_eq!(code, 0);
    let g = parse_marked_graph(&out).unwrap();
    assert_eq!(g.n(), 3);
    let (code, out, _) = call(&["rsimplify", path(&f)]);
    assert_eq!((code, out.contains(" r")), (0, false));
}

#[test]
fn moves_listed_and_applied() {
    let f = file("vertex 0 loop\nvertex 1\nvertex 2\nedge 0 2\nedge 1 2\n");
    let (code, out, _) = call(&["move", path(&f)]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "o2a 0 1"), "{out}");
    let (code, out, _) = call(&["move", path(&f), "--move", "o2a 0 1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "vertex 2\n");
    let (code, _, err) = call(&["move", path(&f), "--move", "o1 2"]);
    assert_eq!(code, 1);
    assert!(err.contains("not isolated"), "{err}");
}

#[test]
fn equiv_verdicts() {
    let one = file("vertex 0\n");
    let empty = file("");
    let hopf = file("vertex 0\nvertex 1\nedge 0 1\n");
    assert_eq!(call(&["equiv", path(&one), path(&empty)]).1, "equivalent 1\n");
    assert_eq!(call(&["equiv", path(&hopf), path(&empty)]).1, "distinct jones\n");
}

#[test]
fn verify_reports_pass() {
    let code = file("1 2 3 1 2 3 signs 1+ 2+ 3+\n");
    let graphs = file("graph a\nvertex 0 mark c loop\nvertex 1 mark ur\nedge 0 1\ngraph b\nfreeloops 2\n");
    let (status, out, _) = call(&["verify", path(&code), path(&graphs)]);
    assert_eq!(status, 0);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
    assert_eq!(out.lines().count(), 3 + 4);
}

#[test]
fn parse_errors_carry_position() {
    let f = file("vertex 0\nedge 0 zz\n");
    let (code, _, err) = call(&["bracket", path(&f)]);
    assert_eq!(code, 1);
    assert!(err.contains(":2:8:"), "{err}");
    let g = file("1 2 / 1 signs 1+ 2+\n");
    assert_eq!(call(&["oracle", path(&g)]).0, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["frobnicate"]).0, 1);
    assert_eq!(call(&["bracket"]).0, 1);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_markbracket");
    let f = file("vertex 0\n");
    let ok = Command::new(bin).args(["bracket", path(&f)]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "A*d + B\n");
    let bad = Command::new(bin).args(["bracket", "/nonexistent/file"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
