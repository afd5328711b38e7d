//! Circuit intermediate representation.
//!
//! Wires `q0 .. q(cr-1)` are causality-respecting; the `ctc` wires follow.
//! Steps are applied in order, so the assembled unitary is
//! `U_last · ... · U_first`.

mod parse;
mod print;

pub use parse::parse_circuit;
pub use print::print_circuit;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ONE, ZERO};
use crate::state::EQ_TOL;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Swap,
    /// Control is the first target.
    Cnot,
    Custom {
        name: String,
        matrix: CMatrix,
    },
}

impl GateKind {
    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "swap" => GateKind::Swap,
            "cnot" => GateKind::Cnot,
            _ => return None,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Swap => "swap",
            GateKind::Cnot => "cnot",
            GateKind::Custom { name, .. } => name,
        }
    }

    /// Number of target wires, or `None` for a custom matrix whose dimension
    /// is not a power of two.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Swap | GateKind::Cnot => Some(2),
            GateKind::Custom { matrix, .. } => {
                if matrix.is_square() {
                    linalg::qubits_for_dim(matrix.nrows()).filter(|&k| k > 0)
                } else {
                    None
                }
            }
            _ => Some(1),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            GateKind::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            GateKind::Y => CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
            GateKind::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
            GateKind::H => CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            GateKind::S => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)]),
            GateKind::Swap => permutation_matrix(4, |i| [0, 2, 1, 3][i]),
            GateKind::Cnot => permutation_matrix(4, |i| [0, 1, 3, 2][i]),
            GateKind::Custom { matrix, .. } => matrix.clone(),
        }
    }
}

fn permutation_matrix(dim: usize, image: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(image(col), col)] = ONE;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }

    pub fn custom(name: &str, matrix: CMatrix, targets: Vec<usize>) -> Self {
        Self::new(GateKind::Custom { name: name.to_string(), matrix }, targets)
    }
}

/// Control polarity: a black circle fires on `|1>`, a white circle on `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    OnOne,
    OnZero,
}

impl Polarity {
    pub fn bit(self) -> u8 {
        match self {
            Polarity::OnOne => 1,
            Polarity::OnZero => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledGate {
    pub conditions: Vec<(usize, Polarity)>,
    pub body: Gate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Gate(Gate),
    Controlled(ControlledGate),
}

impl Step {
    /// Wires touched by the step, controls first.
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Step::Gate(g) => g.targets.clone(),
            Step::Controlled(cg) => {
                cg.conditions.iter().map(|(w, _)| *w).chain(cg.body.targets.iter().copied()).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub cr_wires: usize,
    pub ctc_wires: usize,
    /// Ancilla preparations on CR wires: `(wire, basis bit)`.
    pub inits: Vec<(usize, u8)>,
    pub steps: Vec<Step>,
}

impl Circuit {
    pub fn new(cr_wires: usize, ctc_wires: usize) -> Self {
        Self { cr_wires, ctc_wires, ..Default::default() }
    }

    pub fn total_wires(&self) -> usize {
        self.cr_wires + self.ctc_wires
    }

    pub fn ctc_range(&self) -> std::ops::Range<usize> {
        self.cr_wires..self.total_wires()
    }

    pub fn init(mut self, wire: usize, bit: u8) -> Self {
        self.inits.push((wire, bit));
        self
    }

    pub fn gate(mut self, kind: GateKind, targets: &[usize]) -> Self {
        self.steps.push(Step::Gate(Gate::new(kind, targets.to_vec())));
        self
    }

    pub fn controlled(mut self, conditions: &[(usize, Polarity)], body: Gate) -> Self {
        self.steps.push(Step::Controlled(ControlledGate { conditions: conditions.to_vec(), body }));
        self
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }
}

/// Machine-readable diagnostic codes reported by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticCode {
    OutOfRangeWire,
    DuplicateTarget,
    ArityMismatch,
    NonUnitary,
    BadMatrixShape,
    ControlTargetOverlap,
    DuplicateControl,
    EmptyControl,
    DuplicateInit,
    InitOnCtcWire,
    NoWires,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::OutOfRangeWire => "out-of-range-wire",
            DiagnosticCode::DuplicateTarget => "duplicate-target",
            DiagnosticCode::ArityMismatch => "arity-mismatch",
            DiagnosticCode::NonUnitary => "non-unitary",
            DiagnosticCode::BadMatrixShape => "bad-matrix-shape",
            DiagnosticCode::ControlTargetOverlap => "control-target-overlap",
            DiagnosticCode::DuplicateControl => "duplicate-control",
            DiagnosticCode::EmptyControl => "empty-control",
            DiagnosticCode::DuplicateInit => "duplicate-init",
            DiagnosticCode::InitOnCtcWire => "init-on-ctc-wire",
            DiagnosticCode::NoWires => "no-wires",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// Index into `steps`, when the problem belongs to one step.
    pub step: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(s) => write!(f, "[{}] step {}: {}", self.code, s, self.message),
            None => write!(f, "[{}] {}", self.code, self.message),
        }
    }
}

/// Checks every circuit invariant. An empty list means the circuit is valid.
pub fn validate(c: &Circuit) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if c.total_wires() == 0 {
        out.push(Diagnostic { code: DiagnosticCode::NoWires, step: None, message: "circuit declares no wires".into() });
    }
    let mut inited = BTreeSet::new();
    for &(w, _) in &c.inits {
        if w >= c.total_wires() {
            out.push(Diagnostic {
                code: DiagnosticCode::OutOfRangeWire,
                step: None,
                message: format!("init on q{w} but only {} wires declared", c.total_wires()),
            });
        } else if w >= c.cr_wires {
            out.push(Diagnostic {
                code: DiagnosticCode::InitOnCtcWire,
                step: None,
                message: format!("init on CTC wire q{w}"),
            });
        }
        if !inited.insert(w) {
            out.push(Diagnostic {
                code: DiagnosticCode::DuplicateInit,
                step: None,
                message: format!("q{w} initialized twice"),
            });
        }
    }
    for (i, step) in c.steps.iter().enumerate() {
        for (code, message) in step_problems(step, c.total_wires()) {
            out.push(Diagnostic { code, step: Some(i), message });
        }
    }
    out
}

pub(crate) fn gate_problems(g: &Gate, wires: usize) -> Vec<(DiagnosticCode, String)> {
    let mut out = Vec::new();
    match g.kind.arity() {
        None => out.push((
            DiagnosticCode::BadMatrixShape,
            format!("custom matrix `{}` must be square with power-of-two dimension", g.kind.name()),
        )),
        Some(k) if k != g.targets.len() => out.push((
            DiagnosticCode::ArityMismatch,
            format!("`{}` takes {k} wire(s), got {}", g.kind.name(), g.targets.len()),
        )),
        Some(_) => {}
    }
    if let GateKind::Custom { name, matrix } = &g.kind {
        if g.kind.arity().is_some() {
            let deviation = linalg::unitarity_deviation(matrix);
            if deviation > EQ_TOL {
                out.push((DiagnosticCode::NonUnitary, format!("`{name}` deviates from unitary by {deviation:.3e}")));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for &t in &g.targets {
        if t >= wires {
            out.push((DiagnosticCode::OutOfRangeWire, format!("q{t} but only {wires} wires declared")));
        }
        if !seen.insert(t) {
            out.push((DiagnosticCode::DuplicateTarget, format!("duplicate wire q{t} in targets")));
        }
    }
    out
}

pub(crate) fn step_problems(step: &Step, wires: usize) -> Vec<(DiagnosticCode, String)> {
    match step {
        Step::Gate(g) => gate_problems(g, wires),
        Step::Controlled(cg) => {
            let mut out = gate_problems(&cg.body, wires);
            if cg.conditions.is_empty() {
                out.push((DiagnosticCode::EmptyControl, "ctrl without conditions".into()));
            }
            let mut seen = BTreeSet::new();
            for &(w, _) in &cg.conditions {
                if w >= wires {
                    out.push((DiagnosticCode::OutOfRangeWire, format!("control q{w} but only {wires} wires declared")));
                }
                if !seen.insert(w) {
                    out.push((DiagnosticCode::DuplicateControl, format!("two controls on q{w}")));
                }
                if cg.body.targets.contains(&w) {
                    out.push((DiagnosticCode::ControlTargetOverlap, format!("q{w} is both control and target")));
                }
            }
            out
        }
    }
}

fn check_valid(c: &Circuit) -> Result<()> {
    let diags = validate(c);
    if diags.is_empty() {
        Ok(())
    } else {
        let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        Err(Error::Circuit(text.join("; ")))
    }
}

/// Matrix of a single step on its own wires (see [`Step::wires`]).
pub fn step_matrix(step: &Step) -> CMatrix {
    match step {
        Step::Gate(g) => g.kind.matrix(),
        Step::Controlled(cg) => {
            let body = cg.body.kind.matrix();
            let nc = cg.conditions.len();
            let bd = body.nrows();
            let dim = (1usize << nc) * bd;
            let pattern = cg.conditions.iter().fold(0usize, |acc, (_, p)| (acc << 1) | p.bit() as usize);
            // Sum over control patterns of |pattern><pattern| ⊗ (body or I).
            let mut m = linalg::identity(dim);
            let base = pattern * bd;
            for r in 0..bd {
                for col in 0..bd {
                    m[(base + r, base + col)] = body[(r, col)];
                }
            }
            m
        }
    }
}

/// Global `2^(cr+ctc)` unitary: the ordered product of the embedded steps.
pub fn assemble_unitary(c: &Circuit) -> Result<CMatrix> {
    check_valid(c)?;
    let n = c.total_wires();
    linalg::check_cap(n)?;
    let mut u = linalg::identity(1 << n);
    for step in &c.steps {
        u = linalg::apply_left(&u, &step_matrix(step), &step.wires(), n)?;
    }
    Ok(u)
}

/// The four boxes of the Brun–Harrington–Wilde discrimination circuit, as
/// 4x4 unitaries on (input, ancilla). Compositions apply the right factor
/// first.
pub fn bhw_boxes() -> [(&'static str, CMatrix); 4] {
    let i2 = linalg::identity(2);
    let x = GateKind::X.matrix();
    let h = GateKind::H.matrix();
    let swap = GateKind::Swap.matrix();
    let u00 = swap.clone();
    let u01 = linalg::kron(&x, &x);
    let u10 = linalg::kron(&x, &i2) * linalg::kron(&h, &i2);
    let u11 = linalg::kron(&x, &h) * &swap;
    [("U00", u00), ("U01", u01), ("U10", u10), ("U11", u11)]
}

/// The BHW circuit: CR wires `q0` (unknown input) and `q1` (ancilla, `|0>`),
/// CTC wires `q2`, `q3`. After the swaps the CR wires carry the CTC state and
/// act as controls; their final computational-basis values are the registers
/// `a` (on `q0`) and `b` (on `q1`).
pub fn bhw_circuit() -> Circuit {
    use Polarity::{OnOne, OnZero};
    let mut c = Circuit::new(2, 2).init(1, 0).gate(GateKind::Swap, &[0, 2]).gate(GateKind::Swap, &[1, 3]);
    let pols = [(OnZero, OnZero), (OnZero, OnOne), (OnOne, OnZero), (OnOne, OnOne)];
    for ((name, m), (p0, p1)) in bhw_boxes().into_iter().zip(pols) {
        c = c.controlled(&[(0, p0), (1, p1)], Gate::custom(name, m, vec![2, 3]));
    }
    c
}
