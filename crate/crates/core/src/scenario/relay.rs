//! Chained signaling hops.
//!
//! Each hop is analyzed as its own two-party scenario and run in its priority
//! frame. A bit travels by choosing the sender's setting; the receiver decodes
//! the outcome the priority frame associates with that setting.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::bhw_circuit;
use crate::error::{Error, Result};
use crate::pctc::NullPolicy;
use crate::state::{Basis, Bell};

use super::consistency::{analyze_consistency, ConsistencyReport};
use super::experiments::ralph_circuit;
use super::{BasisSpec, Event, Operation, Prep, Scenario, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    /// D-CTC: the sender picks a measurement basis, the receiver runs BHW.
    BasisChoice,
    /// P-CTC: the sender optionally phase-flips and sends her half into the
    /// CTC; the receiver measures in the diagonal basis.
    PhaseFlip,
}

impl Mechanism {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "dctc" | "basis-choice" => Some(Mechanism::BasisChoice),
            "pctc" | "phase-flip" => Some(Mechanism::PhaseFlip),
            _ => None,
        }
    }

    pub fn semantics(self) -> Semantics {
        match self {
            Mechanism::BasisChoice => Semantics::Dctc,
            Mechanism::PhaseFlip => Semantics::Pctc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hop {
    pub sender: String,
    pub receiver: String,
    #[serde(serialize_with = "serialize_bell")]
    pub shared: Bell,
    pub mechanism: Mechanism,
    pub spacelike: bool,
}

fn serialize_bell<S: serde::Serializer>(b: &Bell, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(b.label())
}

impl Hop {
    pub fn new(sender: &str, receiver: &str, shared: Bell, mechanism: Mechanism) -> Self {
        Hop { sender: sender.into(), receiver: receiver.into(), shared, mechanism, spacelike: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaySpec {
    pub hops: Vec<Hop>,
    pub message: Vec<u8>,
    /// Timestamp of each agent's action.
    pub times: BTreeMap<String, f64>,
    pub null_policy: NullPolicy,
}

impl RelaySpec {
    /// Alice → Clio → Bob with Bob's action before Alice's.
    pub fn two_hop(mechanism: Mechanism, message: &[u8]) -> Self {
        RelaySpec {
            hops: vec![
                Hop::new("alice", "clio", Bell::PsiPlus, mechanism),
                Hop::new("clio", "bob", Bell::PsiPlus, mechanism),
            ],
            message: message.to_vec(),
            times: [("alice".to_string(), 2.0), ("clio".to_string(), 1.0), ("bob".to_string(), 0.0)].into(),
            null_policy: NullPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Scenario(format!("relay: {m}")));
        if self.hops.is_empty() {
            return fail("no hops".into());
        }
        if let Some(b) = self.message.iter().find(|b| **b > 1) {
            return fail(format!("message bit {b} is not 0 or 1"));
        }
        for (i, hop) in self.hops.iter().enumerate() {
            if !hop.spacelike {
                return fail(format!("hop {} is not marked spacelike-separated", i + 1));
            }
            if hop.sender == hop.receiver {
                return fail(format!("hop {} sends from {} to itself", i + 1, hop.sender));
            }
            for agent in [&hop.sender, &hop.receiver] {
                if !self.times.contains_key(agent) {
                    return fail(format!("no timestamp for {agent}"));
                }
            }
            if i > 0 && self.hops[i - 1].receiver != hop.sender {
                return fail(format!("hop {} starts at {}, not at the previous receiver", i + 1, hop.sender));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelayResult {
    pub message: Vec<u8>,
    pub decoded: Vec<u8>,
    /// Probability that each decoded bit is the one reported.
    pub bit_probabilities: Vec<f64>,
    pub reports: Vec<ConsistencyReport>,
    /// The last receiver acts before the first sender.
    pub causal_past: bool,
}

/// Name of the setting carrying the sender's bit in a hop scenario.
fn setting_name(m: Mechanism) -> &'static str {
    match m {
        Mechanism::BasisChoice => "sender_basis",
        Mechanism::PhaseFlip => "phase_flip",
    }
}

fn setting_values(m: Mechanism) -> [&'static str; 2] {
    match m {
        Mechanism::BasisChoice => ["computational", "diagonal"],
        Mechanism::PhaseFlip => ["off", "on"],
    }
}

/// The two-party scenario for a single hop.
pub fn hop_scenario(hop: &Hop, times: &BTreeMap<String, f64>, policy: NullPolicy) -> Scenario {
    let (ts, tr) = (times[&hop.sender], times[&hop.receiver]);
    let send_id = format!("{}_send", hop.sender);
    let recv_id = format!("{}_receive", hop.receiver);
    let name = format!("{}-to-{}", hop.sender, hop.receiver);
    let base = Scenario::new(&name, hop.mechanism.semantics())
        .agent(&hop.sender, "sender")
        .agent(&hop.receiver, "receiver")
        .setting(setting_name(hop.mechanism), &setting_values(hop.mechanism))
        .with_null_policy(policy);
    match hop.mechanism {
        Mechanism::BasisChoice => base
            .qubits(&["S", "R", "anc"])
            .prepare(Prep::Bell(hop.shared), &["S", "R"])
            .prepare(Prep::Zero, &["anc"])
            .circuit("bhw", bhw_circuit())
            .event(
                Event::new(&send_id, &hop.sender, ts)
                    .op(Operation::measure("S", BasisSpec::Variable("sender_basis".into()), "sender"))
                    .spacelike_to(&recv_id),
            )
            .event(Event::new(&recv_id, &hop.receiver, tr).op(Operation::interaction(
                "bhw",
                &["R", "anc"],
                &["a", "b"],
            )))
            .observe(&["sender_basis", "a"]),
        Mechanism::PhaseFlip => base
            .qubits(&["R", "S"])
            .prepare(Prep::Bell(hop.shared), &["R", "S"])
            .circuit("ralph", ralph_circuit())
            .event(
                Event::new(&send_id, &hop.sender, ts)
                    .op(Operation::gate(crate::circuit::GateKind::Z, &["S"]).when("phase_flip", "on"))
                    .op(Operation::interaction("ralph", &["S"], &[]))
                    .spacelike_to(&recv_id),
            )
            .event(Event::new(&recv_id, &hop.receiver, tr).op(Operation::measure(
                "R",
                BasisSpec::Fixed(Basis::Diagonal),
                "receiver",
            )))
            .observe(&["phase_flip", "receiver"]),
    }
}

fn record_name(m: Mechanism) -> &'static str {
    match m {
        Mechanism::BasisChoice => "a",
        Mechanism::PhaseFlip => "receiver",
    }
}

/// `t[b][d]`: probability the receiver decodes `d` when the sender encodes
/// `b`, in the priority frame.
fn transfer_matrix(hop: &Hop, report: &ConsistencyReport) -> Result<[[f64; 2]; 2]> {
    let table = report
        .priority_table()
        .ok_or_else(|| Error::Inconsistent(format!("{}: no priority frame", report.scenario)))?;
    let setting = setting_name(hop.mechanism);
    let record = record_name(hop.mechanism);
    let values = setting_values(hop.mechanism);
    let mut outcomes: Vec<String> = table.entries.iter().filter_map(|e| e.outcome.get(record).cloned()).collect();
    outcomes.sort();
    outcomes.dedup();
    let likely = |v: &str| -> Option<String> {
        outcomes
            .iter()
            .map(|o| (o, table.conditional(&[(record, o)], &[(setting, v)])))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(o, _)| o.clone())
    };
    let codes = [likely(values[0]), likely(values[1])];
    let (Some(zero), Some(one)) = (&codes[0], &codes[1]) else {
        return Err(Error::Inconsistent(format!("{}: receiver sees no outcome", report.scenario)));
    };
    if zero == one {
        return Err(Error::Inconsistent(format!("{}: both settings give receiver outcome {zero}", report.scenario)));
    }
    let mut t = [[0.0; 2]; 2];
    for (b, v) in values.iter().enumerate() {
        for (d, code) in [zero, one].iter().enumerate() {
            t[b][d] = table.conditional(&[(record, code)], &[(setting, v)]);
        }
    }
    Ok(t)
}

pub fn run_relay(spec: &RelaySpec) -> Result<RelayResult> {
    spec.validate()?;
    let mut reports = Vec::new();
    let mut transfers = Vec::new();
    for hop in &spec.hops {
        let report = analyze_consistency(&hop_scenario(hop, &spec.times, spec.null_policy))?;
        transfers.push(transfer_matrix(hop, &report)?);
        reports.push(report);
    }
    let mut decoded = Vec::with_capacity(spec.message.len());
    let mut bit_probabilities = Vec::with_capacity(spec.message.len());
    for &bit in &spec.message {
        let mut dist = [0.0; 2];
        dist[bit as usize] = 1.0;
        for t in &transfers {
            dist = [dist[0] * t[0][0] + dist[1] * t[1][0], dist[0] * t[0][1] + dist[1] * t[1][1]];
        }
        let d = if dist[1] > dist[0] { 1 } else { 0 };
        decoded.push(d as u8);
        bit_probabilities.push(dist[d]);
    }
    let first = &spec.hops[0].sender;
    let last = &spec.hops[spec.hops.len() - 1].receiver;
    let causal_past = spec.times[last] < spec.times[first];
    Ok(RelayResult { message: spec.message.clone(), decoded, bit_probabilities, reports, causal_past })
}
