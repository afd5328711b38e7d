//! Random circuits and states shared by the integration tests.
#![allow(dead_code)]

use ctcsim::circuit::{Circuit, ControlledGate, Gate, GateKind, Polarity, Step};
use ctcsim::linalg::{c, CMatrix, CVector};
use ctcsim::state::{DensityState, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = r.random::<f64>().max(1e-300);
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_vector(r: &mut impl Rng, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| c(gaussian(r), gaussian(r)))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(r: &mut impl Rng, dim: usize) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(gaussian(r), gaussian(r)));
    let qr = g.qr();
    let (q, rr) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&CVector::from_fn(dim, |i, _| {
        let d = rr[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        }
    }));
    q * phases
}

pub fn random_pure(r: &mut impl Rng, qubits: usize) -> PureState {
    PureState::normalized(random_vector(r, 1 << qubits)).unwrap()
}

pub fn random_density(r: &mut impl Rng, qubits: usize) -> DensityState {
    let d = 1 << qubits;
    let g = CMatrix::from_fn(d, d, |_, _| c(gaussian(r), gaussian(r)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityState::new(m.unscale(tr)).unwrap()
}

fn distinct_wires(r: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = r.random_range(i..n);
        all.swap(i, j);
    }
    all.truncate(k);
    all
}

/// A random valid circuit over the full gate vocabulary.
pub fn random_circuit(r: &mut impl Rng, cr: usize, ctc: usize, steps: usize) -> Circuit {
    let n = cr + ctc;
    let mut circuit = Circuit::new(cr, ctc);
    for _ in 0..steps {
        let choice = r.random_range(0..10);
        let gate = |r: &mut _, kinds: &[GateKind]| -> Option<Gate> {
            let kind = kinds[Rng::random_range(r, 0..kinds.len())].clone();
            let arity = kind.arity().unwrap();
            (arity <= n).then(|| Gate::new(kind, distinct_wires(r, n, arity)))
        };
        let step = match choice {
            0..=4 => gate(r, &[GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S]).map(Step::Gate),
            5 | 6 => gate(r, &[GateKind::Swap, GateKind::Cnot]).map(Step::Gate),
            7 => {
                let k = if n >= 2 && r.random_bool(0.5) { 2 } else { 1 };
                let u = random_unitary(r, 1 << k);
                Some(Step::Gate(Gate::custom("R", u, distinct_wires(r, n, k))))
            }
            _ if n >= 2 => {
                let wires = distinct_wires(r, n, 2);
                let pol = if r.random_bool(0.5) { Polarity::OnOne } else { Polarity::OnZero };
                let body = if r.random_bool(0.5) {
                    Gate::new(GateKind::X, vec![wires[1]])
                } else {
                    Gate::custom("V", random_unitary(r, 2), vec![wires[1]])
                };
                Some(Step::Controlled(ControlledGate { conditions: vec![(wires[0], pol)], body }))
            }
            _ => None,
        };
        if let Some(s) = step {
            circuit.push(s);
        }
    }
    circuit
}
