//! Direct runners for the individual experiments and the built-in scenarios.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::{assemble_unitary, bhw_circuit, Circuit, Gate, GateKind, Polarity};
use crate::dctc::{ctc_map, evolve_cr_density, evolve_cr_ensemble, evolve_embedded, FixedPointResult};
use crate::error::{Error, Result};
use crate::pctc::{evolve_postselected, NullPolicy, PostSelectionOutcome};
use crate::state::{measure_projective, Basis, Bell, DensityState, Ensemble, PureState, State, NULL_WEIGHT};

use super::consistency::{OutcomeTable, TableEntry};
use super::{BasisSpec, Event, Operation, Prep, Scenario, Semantics};

/// Input to the BHW discrimination circuit. The ancilla starts in `|0>`.
#[derive(Debug, Clone, PartialEq)]
pub enum BhwInput {
    Zero,
    One,
    Plus,
    Minus,
    /// `I/2` as a single density matrix.
    MaximallyMixed,
    /// A proper mixture, evolved member by member.
    Ensemble(Ensemble),
}

impl BhwInput {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "zero" | "0" => BhwInput::Zero,
            "one" | "1" => BhwInput::One,
            "plus" | "+" => BhwInput::Plus,
            "minus" | "-" => BhwInput::Minus,
            "mixed" | "maximally-mixed" => BhwInput::MaximallyMixed,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BhwRun {
    /// `[P(a=0), P(a=1)]`
    pub a: [f64; 2],
    /// `[P(b=0), P(b=1)]`
    pub b: [f64; 2],
    /// One entry per input member (a single entry unless the input is an
    /// ensemble).
    pub fixed_points: Vec<FixedPointResult>,
    /// CTC state leaving the interaction, per member.
    #[serde(serialize_with = "crate::report::serialize_density_vec")]
    pub ctc_out: Vec<DensityState>,
    /// CR output averaged over members.
    #[serde(serialize_with = "crate::report::serialize_density")]
    pub output: DensityState,
}

pub fn run_bhw(input: &BhwInput) -> Result<BhwRun> {
    let members: Vec<(f64, DensityState)> = match input {
        BhwInput::Zero => vec![(1.0, PureState::zero().to_density())],
        BhwInput::One => vec![(1.0, PureState::one().to_density())],
        BhwInput::Plus => vec![(1.0, PureState::plus().to_density())],
        BhwInput::Minus => vec![(1.0, PureState::minus().to_density())],
        BhwInput::MaximallyMixed => vec![(1.0, DensityState::maximally_mixed(1)?)],
        BhwInput::Ensemble(e) => {
            if e.qubits() != 1 {
                return Err(Error::InvalidEnsemble("BHW input must be a single qubit".into()));
            }
            e.members().iter().map(|(p, s)| (*p, s.to_density())).collect()
        }
    };
    let u = assemble_unitary(&bhw_circuit())?;
    let ancilla = PureState::zero().to_density();
    let mut a = [0.0; 2];
    let mut b = [0.0; 2];
    let mut fixed_points = Vec::new();
    let mut ctc_out = Vec::new();
    let mut output: Option<crate::linalg::CMatrix> = None;
    for (p, rho) in members {
        let cr = rho.tensor(&ancilla)?;
        let (out, fp) = evolve_cr_density(&cr, &u)?;
        for bit in 0..2u8 {
            a[bit as usize] += p * out.probability_of(&[0], &[bit])?;
            b[bit as usize] += p * out.probability_of(&[1], &[bit])?;
        }
        ctc_out.push(ctc_map(&fp.rho_ctc, &cr, &u)?);
        let weighted = out.matrix().scale(p);
        output = Some(match output {
            None => weighted,
            Some(acc) => acc + weighted,
        });
        fixed_points.push(fp);
    }
    let output = DensityState::new(output.expect("at least one member"))?;
    Ok(BhwRun { a, b, fixed_points, ctc_out, output })
}

/// Order of Alice's measurement relative to Bob's CTC interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalingFrame {
    AliceFirst,
    BobFirst,
}

impl SignalingFrame {
    pub fn label(self) -> &'static str {
        match self {
            SignalingFrame::AliceFirst => "alice-first",
            SignalingFrame::BobFirst => "bob-first",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "alice-first" => Some(SignalingFrame::AliceFirst),
            "bob-first" => Some(SignalingFrame::BobFirst),
            _ => None,
        }
    }
}

/// Joint `(alice, a, b)` table for Alice and Bob sharing `|psi+>_AB`.
///
/// Alice-first evolves the ensemble Alice's measurement leaves at Bob;
/// Bob-first evolves his reduced state `I/2` and Alice measures afterwards.
pub fn run_bhw_signaling(alice_basis: Basis, frame: SignalingFrame) -> Result<OutcomeTable> {
    if alice_basis.arity() != 1 {
        return Err(Error::Basis(format!("Alice measures one qubit, not in the {alice_basis} basis")));
    }
    let u = assemble_unitary(&bhw_circuit())?;
    let shared: State = PureState::bell(Bell::PsiPlus).into();
    let ancilla: State = PureState::zero().into();
    let mut rows: Vec<(String, [u8; 2], f64)> = Vec::new();
    match frame {
        SignalingFrame::AliceFirst => {
            let mut members = Vec::new();
            let mut labels = Vec::new();
            for (rec, post) in measure_projective(&shared, alice_basis, &[0])? {
                let bob = post.to_density().reduce_to(&[1])?;
                members.push((rec.probability, State::Density(bob.tensor(&ancilla.to_density())?)));
                labels.push(rec.outcome.label().to_string());
            }
            let evolved = evolve_cr_ensemble(&Ensemble::new(members)?, &u)?;
            for ((p, out), label) in evolved.members().iter().zip(labels) {
                push_registers(&mut rows, &label, *p, &out.to_density())?;
            }
        }
        SignalingFrame::BobFirst => {
            let global = shared.to_density().tensor(&ancilla.to_density())?;
            let (after, _) = evolve_embedded(&global, &[1, 2], &u)?;
            for (rec, post) in measure_projective(&State::Density(after), alice_basis, &[0])? {
                let registers = post.to_density().reduce_to(&[1, 2])?;
                push_registers(&mut rows, rec.outcome.label(), rec.probability, &registers)?;
            }
        }
    }
    let context: BTreeMap<String, String> = [("alice_basis".to_string(), alice_basis.name().to_string())].into();
    let entries = rows
        .into_iter()
        .filter(|(_, _, p)| *p >= NULL_WEIGHT)
        .map(|(alice, [a, b], probability)| TableEntry {
            context: context.clone(),
            outcome: [("alice".to_string(), alice), ("a".to_string(), a.to_string()), ("b".to_string(), b.to_string())]
                .into(),
            probability,
        })
        .collect();
    Ok(OutcomeTable { frame: frame.label().into(), entries, forbidden_contexts: Vec::new() })
}

fn push_registers(rows: &mut Vec<(String, [u8; 2], f64)>, alice: &str, p: f64, registers: &DensityState) -> Result<()> {
    for a in 0..2u8 {
        for b in 0..2u8 {
            rows.push((alice.to_string(), [a, b], p * registers.probability_of(&[0, 1], &[a, b])?));
        }
    }
    Ok(())
}

/// Forcing circuit: CR `q0` = system, `q1` = pointer; CTC `q2`.
///
/// The pointer records the system in the computational basis; the CTC bit is
/// then flipped unless the pointer shows `target`, so only that outcome
/// survives post-selection.
pub fn brun_wilde_circuit(target: u8) -> Circuit {
    let polarity = if target == 0 { Polarity::OnOne } else { Polarity::OnZero };
    Circuit::new(2, 1)
        .init(1, 0)
        .gate(GateKind::Cnot, &[0, 1])
        .controlled(&[(1, polarity)], Gate::new(GateKind::X, vec![2]))
}

/// Forces a computational-basis measurement of `psi` to read `target`.
pub fn run_brun_wilde_force(psi: &PureState, target: u8, policy: NullPolicy) -> Result<PostSelectionOutcome> {
    if psi.qubits() != 1 {
        return Err(Error::InvalidState(format!("forcing acts on one qubit, got {}", psi.qubits())));
    }
    if target > 1 {
        return Err(Error::InvalidState(format!("target outcome must be 0 or 1, got {target}")));
    }
    let u = assemble_unitary(&brun_wilde_circuit(target))?;
    let input = State::Pure(psi.tensor(&PureState::zero())?);
    evolve_postselected(&input, &u, 1, policy)
}

/// One CR wire, one CTC wire: `SWAP · CNOT(cr -> ctc)`.
///
/// Its transcription operator is `|0>(<0| + <1|)`, the same map on the
/// entangled qubit as the teleportation form with qubits 1 and 2.
pub fn ralph_circuit() -> Circuit {
    Circuit::new(1, 1).gate(GateKind::Cnot, &[0, 1]).gate(GateKind::Swap, &[0, 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RalphInput {
    /// `|psi+>_BA`
    Entangled,
    /// Bob has already measured `B` in the diagonal basis; `true` for `+`.
    PreMeasured(bool),
}

/// Teleportation form on qubits `(B, A, 1, 2)` with `|phi+>_12`: optional Z
/// on `A`, CNOT from `A` to `1`, projection of `(A, 1)` onto `|phi+>`.
///
/// The returned state lives on `(B, 2)`.
pub fn run_ralph(input: RalphInput, phase_flip: bool, policy: NullPolicy) -> Result<PostSelectionOutcome> {
    let ba = match input {
        RalphInput::Entangled => PureState::bell(Bell::PsiPlus),
        RalphInput::PreMeasured(true) => PureState::plus().tensor(&PureState::plus())?,
        RalphInput::PreMeasured(false) => PureState::minus().tensor(&PureState::minus())?,
    };
    let mut psi = ba.tensor(&PureState::bell(Bell::PhiPlus))?;
    if phase_flip {
        psi = psi.apply_unitary(&GateKind::Z.matrix(), &[1])?;
    }
    psi = psi.apply_unitary(&GateKind::Cnot.matrix(), &[1, 2])?;
    let v = psi.amplitudes();
    let phi = PureState::bell(Bell::PhiPlus);
    let bell = phi.amplitudes();
    let out = crate::linalg::CVector::from_fn(4, |i, _| {
        let (b, q2) = (i >> 1, i & 1);
        (0..4).map(|p| bell[p].conj() * v[(b << 3) | (p << 1) | q2]).sum()
    });
    let weight = out.norm_squared();
    if weight < NULL_WEIGHT {
        if policy == NullPolicy::ErrorOnNull {
            return Err(Error::NullProjection);
        }
        return Ok(PostSelectionOutcome { state: None, weight, null: true, policy });
    }
    let state = PureState::normalized(out)?;
    Ok(PostSelectionOutcome { state: Some(State::Pure(state)), weight, null: false, policy })
}

/// Alice measures her half of `|psi+>_AB` in a chosen basis; Bob feeds his
/// half into the BHW circuit and reads `a` and `b`.
pub fn bhw_signaling_scenario() -> Scenario {
    Scenario::new("bhw-signaling", Semantics::Dctc)
        .agent("alice", "sender")
        .agent("bob", "receiver")
        .qubits(&["A", "B", "anc"])
        .prepare(Prep::Bell(Bell::PsiPlus), &["A", "B"])
        .prepare(Prep::Zero, &["anc"])
        .setting("alice_basis", &["computational", "diagonal"])
        .circuit("bhw", bhw_circuit())
        .event(
            Event::new("alice_measure", "alice", 2.0)
                .op(Operation::measure("A", BasisSpec::Variable("alice_basis".into()), "alice"))
                .spacelike_to("bob_feed"),
        )
        .event(Event::new("bob_feed", "bob", 1.0).op(Operation::interaction("bhw", &["B", "anc"], &["a", "b"])))
        .observe(&["alice_basis", "a"])
}

/// Alice optionally phase-flips her half of `|psi+>_BA` and sends it into the
/// CTC; Bob measures his half in the diagonal basis.
pub fn ralph_scenario() -> Scenario {
    Scenario::new("ralph", Semantics::Pctc)
        .agent("alice", "sender")
        .agent("bob", "receiver")
        .qubits(&["B", "A"])
        .prepare(Prep::Bell(Bell::PsiPlus), &["B", "A"])
        .setting("phase_flip", &["off", "on"])
        .circuit("ralph", ralph_circuit())
        .event(
            Event::new("alice_act", "alice", 2.0)
                .op(Operation::gate(GateKind::Z, &["A"]).when("phase_flip", "on"))
                .op(Operation::interaction("ralph", &["A"], &[]))
                .spacelike_to("bob_measure"),
        )
        .event(Event::new("bob_measure", "bob", 1.0).op(Operation::measure(
            "B",
            BasisSpec::Fixed(Basis::Diagonal),
            "bob",
        )))
        .observe(&["phase_flip", "bob"])
}

/// Alice forces the outcome of a measurement on her half of `|phi+>_AB`;
/// Bob measures his half in the computational basis.
pub fn brun_wilde_signaling_scenario() -> Scenario {
    Scenario::new("brun-wilde-signaling", Semantics::Pctc)
        .agent("alice", "sender")
        .agent("bob", "receiver")
        .qubits(&["A", "B", "pointer"])
        .prepare(Prep::Bell(Bell::PhiPlus), &["A", "B"])
        .prepare(Prep::Zero, &["pointer"])
        .setting("force", &["0", "1"])
        .circuit("force0", brun_wilde_circuit(0))
        .circuit("force1", brun_wilde_circuit(1))
        .event(
            Event::new("alice_force", "alice", 2.0)
                .op(Operation::interaction("force0", &["A", "pointer"], &[]).when("force", "0"))
                .op(Operation::interaction("force1", &["A", "pointer"], &[]).when("force", "1"))
                .spacelike_to("bob_measure"),
        )
        .event(Event::new("bob_measure", "bob", 1.0).op(Operation::measure(
            "B",
            BasisSpec::Fixed(Basis::Computational),
            "bob",
        )))
        .observe(&["force", "bob"])
}

/// Both parties measure halves of `|phi+>` with no CTC involved.
pub fn bell_test_scenario() -> Scenario {
    Scenario::new("bell-test", Semantics::Dctc)
        .agent("alice", "observer")
        .agent("bob", "observer")
        .qubits(&["A", "B"])
        .prepare(Prep::Bell(Bell::PhiPlus), &["A", "B"])
        .setting("alice_basis", &["computational", "diagonal"])
        .setting("bob_basis", &["computational", "diagonal"])
        .event(
            Event::new("alice_measure", "alice", 1.0)
                .op(Operation::measure("A", BasisSpec::Variable("alice_basis".into()), "alice"))
                .spacelike_to("bob_measure"),
        )
        .event(Event::new("bob_measure", "bob", 1.0).op(Operation::measure(
            "B",
            BasisSpec::Variable("bob_basis".into()),
            "bob",
        )))
        .observe(&["alice", "bob"])
}
