//! Branching execution of a scenario in one event order.
//!
//! Each branch is a classical history: its probability, the values of the
//! settings and records seen so far, and the conditional register state.

use std::collections::BTreeMap;

use crate::circuit::assemble_unitary;
use crate::dctc::evolve_embedded;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pctc::postselect_embedded;
use crate::state::{measure_projective, Basis, DensityState, PureState, State};

use super::{Action, BasisSpec, Prep, Scenario, Semantics};

/// Record value marking a P-CTC interaction whose projection was null.
pub(crate) const FAILED: &str = "failed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NullMode {
    /// A null projection aborts the run.
    Fail,
    /// The interaction fails to occur; the branch continues unchanged.
    Continue,
    /// Post-selection reweights branches; null branches are removed.
    Forbid,
}

#[derive(Debug, Clone)]
pub(crate) struct Branch {
    pub prob: f64,
    pub vars: BTreeMap<String, String>,
    pub state: DensityState,
}

pub(crate) struct Compiled {
    index: BTreeMap<String, usize>,
    unitaries: BTreeMap<String, (CMatrix, usize)>,
    initial: DensityState,
}

pub(crate) fn compile(s: &Scenario) -> Result<Compiled> {
    s.validate()?;
    let index: BTreeMap<String, usize> = s.qubits.iter().enumerate().map(|(i, q)| (q.clone(), i)).collect();
    let mut unitaries = BTreeMap::new();
    for (name, c) in &s.circuits {
        unitaries.insert(name.clone(), (assemble_unitary(c)?, c.ctc_wires));
    }
    let mut joint: Option<DensityState> = None;
    let mut order = Vec::new();
    for (prep, qs) in &s.prepare {
        let factor = prep_state(*prep);
        joint = Some(match joint {
            None => factor,
            Some(j) => j.tensor(&factor)?,
        });
        order.extend(qs.iter().cloned());
    }
    let joint = joint.ok_or_else(|| Error::Scenario("nothing is prepared".into()))?;
    let keep: Vec<usize> = s.qubits.iter().map(|q| order.iter().position(|o| o == q).unwrap()).collect();
    let initial = joint.reduce_to(&keep)?;
    Ok(Compiled { index, unitaries, initial })
}

fn prep_state(prep: Prep) -> DensityState {
    match prep {
        Prep::Zero => PureState::zero().to_density(),
        Prep::One => PureState::one().to_density(),
        Prep::Plus => PureState::plus().to_density(),
        Prep::Minus => PureState::minus().to_density(),
        Prep::Mixed => DensityState::maximally_mixed(1).expect("one qubit"),
        Prep::Bell(b) => PureState::bell(b).to_density(),
    }
}

/// Runs the events in `order` with the given setting values.
pub(crate) fn run_order(
    s: &Scenario,
    compiled: &Compiled,
    order: &[usize],
    context: &BTreeMap<String, String>,
    mode: NullMode,
) -> Result<Vec<Branch>> {
    let mut branches = vec![Branch { prob: 1.0, vars: context.clone(), state: compiled.initial.clone() }];
    for &ev in order {
        let event = &s.events[ev];
        for op in &event.ops {
            let mut next = Vec::with_capacity(branches.len());
            for b in branches {
                let active = match &op.when {
                    None => true,
                    Some(cond) => b.vars.get(&cond.var) == Some(&cond.value),
                };
                if !active {
                    next.push(b);
                    continue;
                }
                apply(s, compiled, &event.id, &op.action, b, mode, &mut next)?;
            }
            branches = next;
        }
    }
    Ok(branches)
}

fn apply(
    s: &Scenario,
    compiled: &Compiled,
    event: &str,
    action: &Action,
    b: Branch,
    mode: NullMode,
    out: &mut Vec<Branch>,
) -> Result<()> {
    let idx = |q: &String| compiled.index[q];
    match action {
        Action::Measure { qubit, basis, record } => {
            let basis = match basis {
                BasisSpec::Fixed(x) => *x,
                BasisSpec::Variable(v) => {
                    let name = b
                        .vars
                        .get(v)
                        .ok_or_else(|| Error::Scenario(format!("event {event}: {v} is not yet defined")))?;
                    Basis::from_name(name)
                        .ok_or_else(|| Error::Scenario(format!("event {event}: {name} is not a basis")))?
                }
            };
            split(b, &[idx(qubit)], basis, record, out)
        }
        Action::Gate { kind, qubits } => {
            let targets: Vec<usize> = qubits.iter().map(idx).collect();
            let state = b.state.apply_unitary(&kind.matrix(), &targets)?;
            out.push(Branch { state, ..b });
            Ok(())
        }
        Action::Interaction { circuit, wires, read } => {
            let (u, ctc) = &compiled.unitaries[circuit];
            let targets: Vec<usize> = wires.iter().map(idx).collect();
            let interacted = match s.semantics {
                Semantics::Dctc => {
                    let (state, _) = evolve_embedded(&b.state, &targets, u)?;
                    Branch { state, ..b }
                }
                Semantics::Pctc => match postselect_embedded(&b.state, &targets, u, *ctc)? {
                    (Some(state), w) => {
                        let prob = if mode == NullMode::Forbid { b.prob * w } else { b.prob };
                        Branch { state, prob, vars: b.vars }
                    }
                    (None, _) => match mode {
                        NullMode::Fail => return Err(Error::NullProjection),
                        NullMode::Forbid => return Ok(()),
                        NullMode::Continue => {
                            let mut vars = b.vars;
                            for r in read {
                                vars.insert(r.clone(), FAILED.into());
                            }
                            vars.insert(format!("{event}.interaction"), FAILED.into());
                            out.push(Branch { vars, ..b });
                            return Ok(());
                        }
                    },
                },
            };
            let mut pending = vec![interacted];
            for (r, w) in read.iter().zip(&targets) {
                let mut next = Vec::new();
                for p in pending {
                    split(p, &[*w], Basis::Computational, r, &mut next)?;
                }
                pending = next;
            }
            out.extend(pending);
            Ok(())
        }
    }
}

fn split(b: Branch, qubits: &[usize], basis: Basis, record: &str, out: &mut Vec<Branch>) -> Result<()> {
    let state = State::Density(b.state);
    for (rec, post) in measure_projective(&state, basis, qubits)? {
        let mut vars = b.vars.clone();
        vars.insert(record.to_string(), rec.outcome.label().to_string());
        out.push(Branch { prob: b.prob * rec.probability, vars, state: post.to_density() });
    }
    Ok(())
}
