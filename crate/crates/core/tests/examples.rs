//! Runs each example program built alongside the tests and checks the lines
//! that carry its result.

use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> String {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_ctcsim"));
    let path = bin.parent().unwrap().join("examples").join(name);
    assert!(path.exists(), "{} not built; run through `cargo test`, which builds the examples", path.display());
    let out = Command::new(&path).output().unwrap();
    assert!(out.status.success(), "{name} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn has(out: &str, line: &str) {
    assert!(out.lines().any(|l| l.trim_end() == line), "missing {line:?} in:\n{out}");
}

#[test]
fn bhw_discrimination() {
    let out = example("bhw_discrimination");
    assert!(out.contains("Plus: P(a=1) = 1.000, P(b=1) = 0.000"), "{out}");
    has(&out, "I/2 input: P(a=1) = 0.500");
}

#[test]
fn signaling() {
    let out = example("signaling");
    has(&out, "alice-first  diagonal       P(a=1) = 1.000");
    has(&out, "bob-first    diagonal       P(a=1) = 0.500");
    has(&out, "priority frame: alice-first");
}

#[test]
fn brun_wilde() {
    let out = example("brun_wilde");
    has(&out, "|0> forced to 1: null, the event cannot happen");
    has(&out, "|+> forced to 1 (weight 0.500):");
}

#[test]
fn ralph() {
    let out = example("ralph");
    has(&out, "Bob saw +, flip true: null = true");
    has(&out, "Bob saw -, flip true: null = false");
}

#[test]
fn relay() {
    let out = example("relay");
    has(&out, "BasisChoice: sent [1, 0, 1, 1], decoded [1, 0, 1, 1], arrives before it was sent: true");
    has(&out, "PhaseFlip: sent [1, 0, 1, 1], decoded [1, 0, 1, 1], arrives before it was sent: true");
}

#[test]
fn fixed_point() {
    let out = example("fixed_point");
    assert!(out.contains("grandfather: entropy 0.6931 nats, degenerate true"), "{out}");
    assert!(out.contains("swap-in: entropy 0.0000 nats, degenerate false"), "{out}");
}

#[test]
fn montecarlo() {
    let out = example("montecarlo");
    has(&out, "accepted 24866 of 100000 (analytic 0.2500)");
}

#[test]
fn circuit_dsl() {
    let out = example("circuit_dsl");
    has(&out, "3 steps, 0 diagnostics");
    has(&out, "rejected: 2:3: [out-of-range-wire] q3 but only 2 wires declared");
}

#[test]
fn consistency() {
    let out = example("consistency");
    has(&out, "consistent: true, priority: Some(\"alice-first\")");
}
