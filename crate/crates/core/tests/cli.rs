//! Exit-code contract of the command-line front end, driven in process.

use std::path::PathBuf;

use doorkit::cli::{run, EXIT_CAP, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn doorkit(args: &[&str]) -> Out {
    let mut argv = vec!["doorkit"];
    argv.extend_from_slice(args);
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(argv, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("doorkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// A door behind its own opening port: start can open it and walk through.
const REACHABLE: &str = "format: 1
kind: network
name: walk
gadgets: [dir-door]
instances:
  - {id: d, gadget: dir-door, state: closed}
externals: [s, t]
connections:
  - [ext:s, d.O_in]
  - [d.O_out, d.T_in]
  - [ext:t, d.T_out]
  - [d.C_in, d.C_out]
start: ext:s
goal: ext:t
";

/// Same door, but the opening tunnel is unreachable from start.
const UNREACHABLE: &str = "format: 1
kind: network
name: walk
gadgets: [dir-door]
instances:
  - {id: d, gadget: dir-door, state: closed}
externals: [s, t]
connections:
  - [ext:s, d.T_in]
  - [ext:t, d.T_out]
  - [d.O_in, d.O_out]
  - [d.C_in, d.C_out]
start: ext:s
goal: ext:t
";

const SAME: &str = "format: 1
kind: network
name: here
gadgets: [diode]
instances:
  - {id: x, gadget: diode, state: s}
externals: [a, b]
connections:
  - [ext:a, x.in]
  - [ext:b, x.out]
start: ext:a
goal: ext:a
";

const WIRE: &str = "format: 1
kind: network
name: bare
gadgets: [wire]
instances:
  - {id: w, gadget: wire, state: s}
externals: [in, out]
connections:
  - [ext:in, w.in]
  - [ext:out, w.out]
";

const BAD_SYNTAX: &str = "format: 1\nkind: gadget\nname: g\nstates: [a\n";

const BAD_STATE: &str = "format: 1
kind: gadget
name: g
states: [a]
locations: [x, y]
transitions:
  - [a, x, b, y]
";

#[test]
fn verify_catalog_pass() {
    let r = doorkit(&["verify", "--network", "undir-door-diode", "--target", "diode"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("verdict: pass"));
}

#[test]
fn verify_fail_is_negative() {
    let p = scratch("wire.yaml", WIRE);
    let r = doorkit(&[
        "verify",
        "--network",
        p.to_str().unwrap(),
        "--target",
        "diode",
        "--state",
        "s",
    ]);
    assert_eq!(r.code, EXIT_NEGATIVE, "{}", r.stderr);
    assert!(r.stdout.contains("fail-soundness"));
}

#[test]
fn planar_entry_is_ok() {
    let r = doorkit(&["planarity", "scd-diode"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("planar: true"));
}

#[test]
fn non_planar_is_negative() {
    // Unpinned it embeds; with the externals held in order on the outer face it does not.
    let shown = doorkit(&["catalog", "show", "parallel-to-apTC"]).stdout;
    let p = scratch("pinned.yaml", &shown.replace("\nexpect:", "\nplanar: true\nexpect:"));
    assert_eq!(doorkit(&["planarity", "parallel-to-apTC"]).code, EXIT_OK);
    let r = doorkit(&["planarity", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NEGATIVE, "{}", r.stderr);
    assert!(r.stdout.contains("planar: false"));
}

#[test]
fn solve_reachable() {
    let p = scratch("reach.yaml", REACHABLE);
    let r = doorkit(&["solve", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("reachable: true"));
}

#[test]
fn solve_unreachable_is_negative() {
    let p = scratch("unreach.yaml", UNREACHABLE);
    let r = doorkit(&["solve", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NEGATIVE, "{}", r.stderr);
    assert!(r.stdout.contains("reachable: false"));
}

#[test]
fn solve_start_is_goal() {
    let p = scratch("same.yaml", SAME);
    let r = doorkit(&["solve", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("reachable: true"));
    assert!(r.stdout.contains("witness: 0 steps"), "{}", r.stdout);
}

#[test]
fn solve_cap_exceeded() {
    let p = scratch("cap.yaml", REACHABLE);
    let r = doorkit(&["solve", p.to_str().unwrap(), "--cap", "1"]);
    assert_eq!(r.code, EXIT_CAP, "{}", r.stderr);
}

#[test]
fn verify_cap_exceeded() {
    let r = doorkit(&["verify", "--network", "parallel-to-apTC", "--cap", "2"]);
    assert_eq!(r.code, EXIT_CAP, "{}", r.stderr);
}

#[test]
fn malformed_file_reports_position() {
    let p = scratch("bad.yaml", BAD_SYNTAX);
    let r = doorkit(&["classify", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_INPUT);
    let path = p.to_str().unwrap();
    let rest = r.stderr.split(path).nth(1).expect("diagnostic names the file");
    let mut it = rest.trim_start_matches(':').split(':');
    assert!(it.next().unwrap().parse::<usize>().is_ok(), "{}", r.stderr);
    assert!(it.next().unwrap().parse::<usize>().is_ok(), "{}", r.stderr);
}

#[test]
fn unknown_state_is_input_error() {
    let p = scratch("state.yaml", BAD_STATE);
    let r = doorkit(&["classify", p.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.stderr.contains("b"), "{}", r.stderr);
}

#[test]
fn unknown_flag_is_rejected() {
    let r = doorkit(&["solve", "scd-diode", "--bogus"]);
    assert_eq!(r.code, EXIT_INPUT);
}

#[test]
fn unknown_name_is_input_error() {
    assert_eq!(doorkit(&["catalog", "show", "no-such-entry"]).code, EXIT_INPUT);
    assert_eq!(doorkit(&["--format", "2", "catalog", "list"]).code, EXIT_INPUT);
}

#[test]
fn catalog_verify_subset() {
    let r = doorkit(&["catalog", "verify", "open-loop", "scd-diode", "--no-timings"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("2 entries, 2 ok, 0 mismatched"), "{}", r.stdout);
}

#[test]
fn catalog_list_and_show() {
    let r = doorkit(&["catalog", "list", "--kind", "constructions"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.lines().count() >= 30);
    let r = doorkit(&["catalog", "show", "diode"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.starts_with("format: 1"));
}

#[test]
fn classify_door_case() {
    let r = doorkit(&["classify", "door-case-8-OTtocC"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("OTtocC"), "{}", r.stdout);
}

#[test]
fn export_dot_is_deterministic() {
    let a = doorkit(&["export-dot", "scd-otc"]);
    let b = doorkit(&["export-dot", "scd-otc"]);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with("graph "));
    let g = doorkit(&["export-dot", "dir-door"]);
    assert!(g.stdout.starts_with("digraph "));
}

#[test]
fn compile_emits_verified_construction() {
    let dir = std::env::temp_dir().join(format!("doorkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("diode-compiled.yaml");
    let r = doorkit(&["compile", "--target", "diode", "--check", "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = doorkit(&["verify", "--network", out.to_str().unwrap()]);
    assert_eq!(v.code, EXIT_OK, "{}", v.stderr);
}
