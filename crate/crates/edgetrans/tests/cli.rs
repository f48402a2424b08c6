use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgetrans"))
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn census_dir(dir: &std::path::Path, jobs: &str) -> Output {
    bin().args(["--jobs", jobs, "census", "--max-order", "20", "--out"]).arg(dir).output().unwrap()
}

#[test]
fn census_then_decode_smallest() {
    let dir = tempfile::tempdir().unwrap();
    let out = census_dir(dir.path(), "2");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let k4 = std::fs::read_to_string(dir.path().join("CAT_4.s6")).unwrap();
    let dec = run_with_stdin(&["s6", "decode"], &k4);
    assert_eq!(dec.status.code(), Some(0));
    assert_eq!(String::from_utf8(dec.stdout).unwrap(), "n=4\n0: 1 2 3\n1: 0 2 3\n2: 0 1 3\n3: 0 1 2\n");
    let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("max_order=20"), "{manifest}");
}

#[test]
fn census_is_independent_of_job_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(census_dir(a.path(), "1").status.success());
    assert!(census_dir(b.path(), "4").status.success());
    for f in ["summary.csv", "CAT_20.s6", "growth.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn encode_decode_round_trip() {
    let enc = run_with_stdin(&["s6", "encode"], "n=4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    assert_eq!(enc.status.code(), Some(0));
    assert_eq!(String::from_utf8(enc.stdout).unwrap().trim(), ":CcKI");
}

#[test]
fn classify_exit_codes() {
    let ok = run_with_stdin(&["classify"], ":EaGcbcb\n");
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("type=DjM3"));
    // triangular prism is vertex-transitive but not edge-transitive
    let prism = run_with_stdin(&["s6", "encode"], "n=6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n0 3\n1 4\n2 5\n");
    let s6 = String::from_utf8(prism.stdout).unwrap();
    assert_eq!(run_with_stdin(&["classify"], &s6).status.code(), Some(1));
    assert_eq!(run_with_stdin(&["classify"], "not sparse6\n").status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin().arg("no-such-command").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["census", "--max-order", "x"]).output().unwrap().status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "max_order=ten\n").unwrap();
    assert_eq!(bin().arg("--config").arg(&cfg).arg("census").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["verify-inclusions", "--class", "Nope"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn config_file_sets_census_options() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("census.conf");
    std::fs::write(&cfg, format!("# small run\nmax_order=10\nout_dir={}\n", dir.path().join("out").display())).unwrap();
    let out = bin().arg("--config").arg(&cfg).arg("census").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/CAT_10.s6").exists());
    assert!(!dir.path().join("out/CAT_14.s6").exists());
}

#[test]
fn cover_writes_lift() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("cage.s6");
    let cage = edgetrans::named::tutte_8_cage().sparse6();
    std::fs::write(&base, format!("{cage}\n")).unwrap();
    let out = bin().args(["cover", "--prime", "3", "--base"]).arg(&base).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let g = edgetrans::graph::CubicGraph::from_sparse6(String::from_utf8(out.stdout).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(g.n(), 90);
}
