//! Signaling, forcing and relay experiments, plus the frame-consistency
//! analyzer.
//!
//! A [`Scenario`] is a set of agents acting on named qubits. Each [`Event`]
//! belongs to one agent, carries a timestamp and a list of operations, and may
//! be declared spacelike-separated from other events. Causally ordered events
//! keep their timestamp order; spacelike pairs may occur in either order, and
//! each admissible total order is a frame.
//!
//! Probabilities of events are compared across frames by
//! [`analyze_consistency`]: an event with probability zero in some frame is
//! excluded, and a frame whose support avoids every excluded event is given
//! priority.

mod consistency;
mod engine;
mod experiments;
mod file;
mod relay;

pub use consistency::{
    analyze_consistency, analyze_frames, enumerate_frames, run_frame, ConsistencyReport, EventKey, Frame, OutcomeTable,
    TableEntry, EXCLUSION_THRESHOLD, PRIORITY_RULE,
};
pub use experiments::{
    bell_test_scenario, bhw_signaling_scenario, brun_wilde_circuit, brun_wilde_signaling_scenario, ralph_circuit,
    ralph_scenario, run_bhw, run_bhw_signaling, run_brun_wilde_force, run_ralph, BhwInput, BhwRun, RalphInput,
    SignalingFrame,
};
pub use file::{parse_scenario_file, parse_scenario_str, Expectation, ScenarioFile};
pub use relay::{hop_scenario, run_relay, Hop, Mechanism, RelayResult, RelaySpec};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::pctc::NullPolicy;
use crate::state::{Basis, Bell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Dctc,
    Pctc,
}

impl Semantics {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "dctc" | "d-ctc" => Some(Semantics::Dctc),
            "pctc" | "p-ctc" => Some(Semantics::Pctc),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Dctc => "dctc",
            Semantics::Pctc => "pctc",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Agent {
    pub name: String,
    pub role: String,
}

/// Initial state of one or two named qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prep {
    Zero,
    One,
    Plus,
    Minus,
    /// `I/2` on a single qubit.
    Mixed,
    Bell(Bell),
}

impl Prep {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "zero" | "0" => Prep::Zero,
            "one" | "1" => Prep::One,
            "plus" | "+" => Prep::Plus,
            "minus" | "-" => Prep::Minus,
            "mixed" => Prep::Mixed,
            other => Prep::Bell(Bell::from_label(other)?),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Prep::Zero => "zero",
            Prep::One => "one",
            Prep::Plus => "plus",
            Prep::Minus => "minus",
            Prep::Mixed => "mixed",
            Prep::Bell(b) => b.label(),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Prep::Bell(_) => 2,
            _ => 1,
        }
    }
}

/// A free parameter of the scenario; every combination of values is a
/// conditioning context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Setting {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisSpec {
    Fixed(Basis),
    /// Basis named by the value of a setting or earlier record.
    Variable(String),
}

/// `var = value` guard on an operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub var: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Measure {
        qubit: String,
        basis: BasisSpec,
        record: String,
    },
    Gate {
        kind: GateKind,
        qubits: Vec<String>,
    },
    /// Runs a CTC circuit on `wires` (its CR wires, in order) under the
    /// scenario semantics, then reads `read[i]` from `wires[i]` in the
    /// computational basis.
    Interaction {
        circuit: String,
        wires: Vec<String>,
        read: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub action: Action,
    pub when: Option<Condition>,
}

impl Operation {
    pub fn new(action: Action) -> Self {
        Operation { action, when: None }
    }

    pub fn when(mut self, var: &str, value: &str) -> Self {
        self.when = Some(Condition { var: var.into(), value: value.into() });
        self
    }

    pub fn measure(qubit: &str, basis: BasisSpec, record: &str) -> Self {
        Self::new(Action::Measure { qubit: qubit.into(), basis, record: record.into() })
    }

    pub fn gate(kind: GateKind, qubits: &[&str]) -> Self {
        Self::new(Action::Gate { kind, qubits: qubits.iter().map(|s| s.to_string()).collect() })
    }

    pub fn interaction(circuit: &str, wires: &[&str], read: &[&str]) -> Self {
        Self::new(Action::Interaction {
            circuit: circuit.into(),
            wires: wires.iter().map(|s| s.to_string()).collect(),
            read: read.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn records(&self) -> Vec<&str> {
        match &self.action {
            Action::Measure { record, .. } => vec![record.as_str()],
            Action::Interaction { read, .. } => read.iter().map(String::as_str).collect(),
            Action::Gate { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub id: String,
    pub agent: String,
    pub time: f64,
    pub ops: Vec<Operation>,
    /// Events this one is spacelike-separated from. Declaring a pair on
    /// either side is enough.
    pub spacelike: Vec<String>,
}

impl Event {
    pub fn new(id: &str, agent: &str, time: f64) -> Self {
        Event { id: id.into(), agent: agent.into(), time, ops: Vec::new(), spacelike: Vec::new() }
    }

    pub fn op(mut self, op: Operation) -> Self {
        self.ops.push(op);
        self
    }

    pub fn spacelike_to(mut self, other: &str) -> Self {
        self.spacelike.push(other.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub semantics: Semantics,
    pub agents: Vec<Agent>,
    /// Qubit names; the first is the most significant tensor factor.
    pub qubits: Vec<String>,
    pub prepare: Vec<(Prep, Vec<String>)>,
    pub settings: Vec<Setting>,
    /// Setting values pinned for a single run.
    pub pinned: BTreeMap<String, String>,
    pub circuits: BTreeMap<String, Circuit>,
    pub events: Vec<Event>,
    /// Settings and records that make up an event in outcome tables.
    pub observables: Vec<String>,
    pub null_policy: NullPolicy,
}

impl Scenario {
    pub fn new(name: &str, semantics: Semantics) -> Self {
        Scenario {
            name: name.into(),
            semantics,
            agents: Vec::new(),
            qubits: Vec::new(),
            prepare: Vec::new(),
            settings: Vec::new(),
            pinned: BTreeMap::new(),
            circuits: BTreeMap::new(),
            events: Vec::new(),
            observables: Vec::new(),
            null_policy: NullPolicy::default(),
        }
    }

    pub fn agent(mut self, name: &str, role: &str) -> Self {
        self.agents.push(Agent { name: name.into(), role: role.into() });
        self
    }

    pub fn qubits(mut self, names: &[&str]) -> Self {
        self.qubits.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn prepare(mut self, prep: Prep, qubits: &[&str]) -> Self {
        self.prepare.push((prep, qubits.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn setting(mut self, name: &str, values: &[&str]) -> Self {
        self.settings.push(Setting { name: name.into(), values: values.iter().map(|s| s.to_string()).collect() });
        self
    }

    pub fn circuit(mut self, name: &str, circuit: Circuit) -> Self {
        self.circuits.insert(name.into(), circuit);
        self
    }

    pub fn event(mut self, event: Event) -> Self {
        self.events.push(event);
        self
    }

    pub fn observe(mut self, names: &[&str]) -> Self {
        self.observables.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn with_null_policy(mut self, policy: NullPolicy) -> Self {
        self.null_policy = policy;
        self
    }

    pub fn pin(mut self, setting: &str, value: &str) -> Self {
        self.pinned.insert(setting.into(), value.into());
        self
    }

    pub fn setting_named(&self, name: &str) -> Option<&Setting> {
        self.settings.iter().find(|s| s.name == name)
    }

    pub fn event_index(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e.id == id)
    }

    /// Symmetric closure of the declared spacelike pairs, as index pairs
    /// `(i, j)` with `i < j`.
    pub fn spacelike_pairs(&self) -> Result<BTreeSet<(usize, usize)>> {
        let mut pairs = BTreeSet::new();
        for (i, e) in self.events.iter().enumerate() {
            for other in &e.spacelike {
                let j = self
                    .event_index(other)
                    .ok_or_else(|| Error::Scenario(format!("event {} references unknown event {other}", e.id)))?;
                if i == j {
                    return Err(Error::Scenario(format!("event {} is declared spacelike to itself", e.id)));
                }
                pairs.insert((i.min(j), i.max(j)));
            }
        }
        Ok(pairs)
    }

    /// Checks references, preparation coverage and causal declarations.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Scenario(format!("{}: {m}", self.name)));
        let qubits: BTreeSet<&str> = self.qubits.iter().map(String::as_str).collect();
        if qubits.len() != self.qubits.len() {
            return fail("duplicate qubit name".into());
        }
        if self.qubits.is_empty() {
            return fail("no qubits declared".into());
        }
        let mut prepared = BTreeSet::new();
        for (prep, qs) in &self.prepare {
            if qs.len() != prep.arity() {
                return fail(format!("{} prepares {} qubit(s), got {}", prep.name(), prep.arity(), qs.len()));
            }
            for q in qs {
                if !qubits.contains(q.as_str()) {
                    return fail(format!("preparation of unknown qubit {q}"));
                }
                if !prepared.insert(q.as_str()) {
                    return fail(format!("qubit {q} prepared twice"));
                }
            }
        }
        if let Some(q) = self.qubits.iter().find(|q| !prepared.contains(q.as_str())) {
            return fail(format!("qubit {q} is never prepared"));
        }

        let agents: BTreeSet<&str> = self.agents.iter().map(|a| a.name.as_str()).collect();
        let mut ids = BTreeSet::new();
        let mut vars: BTreeMap<&str, Option<&Setting>> =
            self.settings.iter().map(|s| (s.name.as_str(), Some(s))).collect();
        for e in &self.events {
            if !ids.insert(e.id.as_str()) {
                return fail(format!("duplicate event id {}", e.id));
            }
            if !agents.contains(e.agent.as_str()) {
                return fail(format!("event {} references undeclared agent {}", e.id, e.agent));
            }
            if !e.time.is_finite() {
                return fail(format!("event {} has a non-finite timestamp", e.id));
            }
            for op in &e.ops {
                for r in op.records() {
                    if vars.insert(r, None).is_some() {
                        return fail(format!("record {r} in event {} is already defined", e.id));
                    }
                }
            }
        }
        for (name, value) in &self.pinned {
            match self.setting_named(name) {
                Some(s) if s.values.contains(value) => {}
                Some(_) => return fail(format!("{value} is not a value of setting {name}")),
                None => return fail(format!("pinned value for unknown setting {name}")),
            }
        }
        for e in &self.events {
            for op in &e.ops {
                if let Some(cond) = &op.when {
                    match vars.get(cond.var.as_str()) {
                        Some(Some(s)) if !s.values.contains(&cond.value) => {
                            return fail(format!("{} is not a value of setting {}", cond.value, cond.var))
                        }
                        Some(_) => {}
                        None => return fail(format!("event {} conditions on unknown variable {}", e.id, cond.var)),
                    }
                }
                let check_qubit = |q: &str| -> Result<()> {
                    if qubits.contains(q) {
                        Ok(())
                    } else {
                        Err(Error::Scenario(format!("{}: event {} uses unknown qubit {q}", self.name, e.id)))
                    }
                };
                match &op.action {
                    Action::Measure { qubit, basis, .. } => {
                        check_qubit(qubit)?;
                        match basis {
                            BasisSpec::Fixed(b) if b.arity() != 1 => {
                                return fail(format!("event {} measures one qubit in the {b} basis", e.id))
                            }
                            BasisSpec::Variable(v) => match vars.get(v.as_str()) {
                                Some(Some(s)) => {
                                    if let Some(bad) =
                                        s.values.iter().find(|x| Basis::from_name(x).map(|b| b.arity()) != Some(1))
                                    {
                                        return fail(format!("setting {v} value {bad} is not a single-qubit basis"));
                                    }
                                }
                                Some(None) => {}
                                None => return fail(format!("event {} uses unknown basis variable {v}", e.id)),
                            },
                            _ => {}
                        }
                    }
                    Action::Gate { kind, qubits: qs } => {
                        for q in qs {
                            check_qubit(q)?;
                        }
                        if kind.arity() != Some(qs.len()) {
                            return fail(format!(
                                "event {}: {} acts on {:?} qubit(s), got {}",
                                e.id,
                                kind.name(),
                                kind.arity(),
                                qs.len()
                            ));
                        }
                        if distinct(qs) != qs.len() {
                            return fail(format!("event {}: repeated gate target", e.id));
                        }
                    }
                    Action::Interaction { circuit, wires, read } => {
                        let c = self.circuits.get(circuit).ok_or_else(|| {
                            Error::Scenario(format!(
                                "{}: event {} references unknown circuit {circuit}",
                                self.name, e.id
                            ))
                        })?;
                        for q in wires {
                            check_qubit(q)?;
                        }
                        if wires.len() != c.cr_wires {
                            return fail(format!(
                                "circuit {circuit} has {} CR wire(s), event {} supplies {}",
                                c.cr_wires,
                                e.id,
                                wires.len()
                            ));
                        }
                        if distinct(wires) != wires.len() {
                            return fail(format!("event {}: repeated interaction wire", e.id));
                        }
                        if read.len() > wires.len() {
                            return fail(format!("event {} reads more registers than wires", e.id));
                        }
                    }
                }
            }
        }
        for o in &self.observables {
            if !vars.contains_key(o.as_str()) {
                return fail(format!("observable {o} is neither a setting nor a record"));
            }
        }
        let pairs = self.spacelike_pairs()?;
        for i in 0..self.events.len() {
            for j in i + 1..self.events.len() {
                if self.events[i].time == self.events[j].time && !pairs.contains(&(i, j)) {
                    return fail(format!(
                        "events {} and {} share a timestamp but are not spacelike-separated",
                        self.events[i].id, self.events[j].id
                    ));
                }
            }
        }
        Ok(())
    }
}

fn distinct(items: &[String]) -> usize {
    items.iter().collect::<BTreeSet<_>>().len()
}
