//! Scenario file format.
//!
//! ```text
//! [scenario]
//! name = bhw-signaling
//! semantics = dctc
//! qubits = A B anc
//! prepare = psi+(A,B) zero(anc)
//! setting = alice_basis: computational diagonal
//! circuit = bhw: bhw.ctc
//! observables = alice_basis a
//! frame = alice-first
//! alice_basis = diagonal
//!
//! [agents]
//! alice = sender
//! bob = receiver
//!
//! [events]
//! alice_measure.agent = alice
//! alice_measure.time = 2
//! alice_measure.spacelike = bob_feed
//! alice_measure.do = measure A $alice_basis -> alice
//! bob_feed.agent = bob
//! bob_feed.time = 1
//! bob_feed.do = dctc bhw B anc -> a b
//!
//! [expect]
//! P(a=1 | alice_basis=diagonal) = 1
//! excluded = alice_basis=computational a=1; alice_basis=diagonal a=0
//! priority = alice-first
//! ```
//!
//! A key in `[scenario]` named after a setting pins that setting for a single
//! run. Operations (`do`) are `measure Q BASIS -> rec`, a gate name followed
//! by qubits, or `dctc|pctc CIRCUIT WIRES.. [-> rec..]`; any of them may end
//! with `if var=value`. Circuit paths are relative to the scenario file;
//! `builtin:bhw`, `builtin:ralph`, `builtin:force0` and `builtin:force1` name
//! the built-in circuits.
//!
//! A `[relay]` section replaces `[events]`:
//!
//! ```text
//! [relay]
//! mechanism = dctc
//! message = 0110
//! hop = alice -> clio psi+
//! hop = clio -> bob psi+
//! time.alice = 2
//! time.clio = 1
//! time.bob = 0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::circuit::{bhw_circuit, parse_circuit, Circuit, GateKind};
use crate::error::{Error, Result};
use crate::pctc::NullPolicy;
use crate::state::{Basis, Bell};

use super::consistency::EventKey;
use super::experiments::{brun_wilde_circuit, ralph_circuit};
use super::relay::{Hop, Mechanism, RelaySpec};
use super::{Action, BasisSpec, Condition, Event, Operation, Prep, Scenario, Semantics};

/// A checkable claim about a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// `P(outcome | context) = value`, in `frame` or the priority frame.
    Probability {
        frame: Option<String>,
        outcome: Vec<(String, String)>,
        context: Vec<(String, String)>,
        value: f64,
    },
    Excluded(Vec<EventKey>),
    Priority(String),
    Decoded(Vec<u8>),
    CausalPast(bool),
    /// The pinned run hits a null projection.
    Null(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub name: String,
    /// Event scenario; absent for relay files.
    pub scenario: Option<Scenario>,
    pub relay: Option<RelaySpec>,
    /// Frame requested for a single run.
    pub frame: Option<String>,
    pub expectations: Vec<Expectation>,
}

pub fn parse_scenario_file(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text, path.parent())
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
    value_col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn split_line(no: usize, raw: &str, last_eq: bool) -> Result<Line<'_>> {
    let eq = if last_eq { raw.rfind('=') } else { raw.find('=') };
    let eq = eq.ok_or_else(|| err(no, 1, "expected key = value"))?;
    let key = raw[..eq].trim();
    if key.is_empty() {
        return Err(err(no, 1, "missing key"));
    }
    let after = &raw[eq + 1..];
    let value = after.trim();
    let value_col = eq + 2 + (after.len() - after.trim_start().len());
    Ok(Line { no, key, value, value_col })
}

/// Parses scenario text; circuit paths resolve against `base`.
pub fn parse_scenario_str(text: &str, base: Option<&Path>) -> Result<ScenarioFile> {
    let mut sections: BTreeMap<&str, Vec<Line>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| err(no, 1, "unterminated section header"))?.trim();
            if !["scenario", "agents", "events", "relay", "expect"].contains(&name) {
                return Err(err(no, 2, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(err(no, 1, format!("section [{name}] repeated")));
            }
            sections.insert(name, Vec::new());
            current = Some(name);
            continue;
        }
        let section = current.ok_or_else(|| err(no, 1, "key outside any section"))?;
        let last_eq = section == "expect" && trimmed.contains("P(");
        sections.get_mut(section).unwrap().push(split_line(no, content, last_eq)?);
    }

    let header = sections.remove("scenario").ok_or_else(|| err(1, 1, "missing [scenario] section"))?;
    let mut name = None;
    let mut semantics = None;
    let mut frame = None;
    let mut null_policy = NullPolicy::default();
    let mut scenario = Scenario::new("", Semantics::Dctc);
    let mut pins = Vec::new();
    for l in &header {
        match l.key {
            "name" => name = Some(l.value.to_string()),
            "semantics" => {
                semantics = Some(
                    Semantics::from_name(l.value)
                        .ok_or_else(|| err(l.no, l.value_col, format!("unknown semantics {}", l.value)))?,
                )
            }
            "frame" => frame = Some(l.value.to_string()),
            "null_policy" => {
                null_policy = NullPolicy::from_name(l.value)
                    .ok_or_else(|| err(l.no, l.value_col, format!("unknown null policy {}", l.value)))?
            }
            "qubits" => scenario.qubits.extend(l.value.split_whitespace().map(String::from)),
            "prepare" => scenario.prepare.extend(parse_prepare(l)?),
            "setting" => {
                let (n, vals) =
                    l.value.split_once(':').ok_or_else(|| err(l.no, l.value_col, "expected name: values"))?;
                let values: Vec<&str> = vals.split_whitespace().collect();
                if values.is_empty() {
                    return Err(err(l.no, l.value_col, "setting without values"));
                }
                scenario = scenario.setting(n.trim(), &values);
            }
            "circuit" => {
                let (n, src) = l.value.split_once(':').ok_or_else(|| err(l.no, l.value_col, "expected name: path"))?;
                let c = load_circuit(src.trim(), base).map_err(|e| err(l.no, l.value_col, e.to_string()))?;
                scenario.circuits.insert(n.trim().to_string(), c);
            }
            "observables" => scenario.observables.extend(l.value.split_whitespace().map(String::from)),
            _ => pins.push(l),
        }
    }
    let name = name.ok_or_else(|| err(header.first().map_or(1, |l| l.no), 1, "[scenario] has no name"))?;
    scenario.name = name.clone();
    scenario.null_policy = null_policy;
    for l in pins {
        if scenario.setting_named(l.key).is_none() {
            return Err(err(l.no, 1, format!("unknown key {}", l.key)));
        }
        scenario.pinned.insert(l.key.to_string(), l.value.to_string());
    }

    let expectations = match sections.remove("expect") {
        Some(lines) => lines.iter().map(parse_expectation).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };

    if let Some(lines) = sections.remove("relay") {
        if sections.contains_key("events") {
            return Err(err(lines[0].no, 1, "a file has either [relay] or [events], not both"));
        }
        let mut relay = parse_relay(&lines, null_policy)?;
        if let Some(agents) = sections.remove("agents") {
            for l in agents {
                if !relay.times.contains_key(l.key) {
                    return Err(err(l.no, 1, format!("agent {} takes no part in the relay", l.key)));
                }
            }
        }
        if let (Some(sem), Some(hop)) = (semantics, relay.hops.first()) {
            if hop.mechanism.semantics() != sem {
                return Err(err(header[0].no, 1, format!("semantics {sem} does not match the relay mechanism")));
            }
        }
        relay.null_policy = null_policy;
        return Ok(ScenarioFile { name, scenario: None, relay: Some(relay), frame, expectations });
    }

    scenario.semantics = semantics.ok_or_else(|| err(header[0].no, 1, "[scenario] has no semantics"))?;
    for l in sections.remove("agents").unwrap_or_default() {
        scenario = scenario.agent(l.key, l.value);
    }
    let events = sections.remove("events").ok_or_else(|| err(1, 1, "missing [events] section"))?;
    scenario.events = parse_events(&events, scenario.semantics)?;
    scenario.validate()?;
    Ok(ScenarioFile { name, scenario: Some(scenario), relay: None, frame, expectations })
}

fn load_circuit(src: &str, base: Option<&Path>) -> Result<Circuit> {
    if let Some(b) = src.strip_prefix("builtin:") {
        return match b {
            "bhw" => Ok(bhw_circuit()),
            "ralph" => Ok(ralph_circuit()),
            "force0" => Ok(brun_wilde_circuit(0)),
            "force1" => Ok(brun_wilde_circuit(1)),
            other => Err(Error::Scenario(format!("unknown built-in circuit {other}"))),
        };
    }
    let path: PathBuf = match base {
        Some(b) => b.join(src),
        None => PathBuf::from(src),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))
}

fn parse_prepare(l: &Line) -> Result<Vec<(Prep, Vec<String>)>> {
    let mut out = Vec::new();
    let mut rest = l.value;
    while !rest.trim().is_empty() {
        let start = rest.len() - rest.trim_start().len();
        let col = l.value_col + (l.value.len() - rest.len()) + start;
        rest = rest.trim_start();
        let open = rest.find('(').ok_or_else(|| err(l.no, col, "expected state(qubits)"))?;
        let close = rest.find(')').ok_or_else(|| err(l.no, col, "missing )"))?;
        if close < open {
            return Err(err(l.no, col, "expected state(qubits)"));
        }
        let label = &rest[..open];
        let prep = Prep::from_name(label).ok_or_else(|| err(l.no, col, format!("unknown state {label}")))?;
        let qubits: Vec<String> =
            rest[open + 1..close].split(',').map(|q| q.trim().to_string()).filter(|q| !q.is_empty()).collect();
        out.push((prep, qubits));
        rest = &rest[close + 1..];
    }
    Ok(out)
}

fn parse_events(lines: &[Line], semantics: Semantics) -> Result<Vec<Event>> {
    let mut events: Vec<Event> = Vec::new();
    let mut has_time: BTreeMap<String, bool> = BTreeMap::new();
    for l in lines {
        let (id, field) = l.key.split_once('.').ok_or_else(|| err(l.no, 1, "expected event.field"))?;
        let pos = match events.iter().position(|e| e.id == id) {
            Some(p) => p,
            None => {
                events.push(Event::new(id, "", 0.0));
                events.len() - 1
            }
        };
        let e = &mut events[pos];
        match field {
            "agent" => e.agent = l.value.to_string(),
            "time" => {
                e.time = l.value.parse().map_err(|_| err(l.no, l.value_col, format!("bad timestamp {}", l.value)))?;
                has_time.insert(id.to_string(), true);
            }
            "spacelike" => e.spacelike.extend(l.value.split([' ', ',']).filter(|s| !s.is_empty()).map(String::from)),
            "do" => e.ops.push(parse_operation(l, semantics)?),
            other => return Err(err(l.no, id.len() + 2, format!("unknown event field {other}"))),
        }
    }
    for e in &events {
        if e.agent.is_empty() {
            return Err(Error::Scenario(format!("event {} has no agent", e.id)));
        }
        if !has_time.contains_key(&e.id) {
            return Err(Error::Scenario(format!("event {} has no time", e.id)));
        }
    }
    Ok(events)
}

fn parse_operation(l: &Line, semantics: Semantics) -> Result<Operation> {
    let mut text = l.value;
    let mut when = None;
    if let Some(i) = text.find(" if ") {
        let cond = text[i + 4..].trim();
        let (var, value) =
            cond.split_once('=').ok_or_else(|| err(l.no, l.value_col + i + 4, "expected if var=value"))?;
        when = Some(Condition { var: var.trim().into(), value: value.trim().into() });
        text = &text[..i];
    }
    let (head, records) = match text.split_once("->") {
        Some((h, r)) => (h, r.split_whitespace().map(String::from).collect::<Vec<_>>()),
        None => (text, Vec::new()),
    };
    let words: Vec<&str> = head.split_whitespace().collect();
    let verb = *words.first().ok_or_else(|| err(l.no, l.value_col, "empty operation"))?;
    let action = match verb {
        "measure" => {
            let [_, q, basis] = words[..] else {
                return Err(err(l.no, l.value_col, "expected measure QUBIT BASIS -> RECORD"));
            };
            let [record] = &records[..] else {
                return Err(err(l.no, l.value_col, "measure needs exactly one record"));
            };
            let basis = match basis.strip_prefix('$') {
                Some(var) => BasisSpec::Variable(var.into()),
                None => BasisSpec::Fixed(
                    Basis::from_name(basis).ok_or_else(|| err(l.no, l.value_col, format!("unknown basis {basis}")))?,
                ),
            };
            Action::Measure { qubit: q.into(), basis, record: record.clone() }
        }
        "dctc" | "pctc" => {
            if Semantics::from_name(verb) != Some(semantics) {
                return Err(err(l.no, l.value_col, format!("{verb} interaction in a {semantics} scenario")));
            }
            if words.len() < 3 {
                return Err(err(l.no, l.value_col, "expected CIRCUIT WIRES.."));
            }
            Action::Interaction {
                circuit: words[1].into(),
                wires: words[2..].iter().map(|s| s.to_string()).collect(),
                read: records,
            }
        }
        gate => {
            let kind =
                GateKind::from_name(gate).ok_or_else(|| err(l.no, l.value_col, format!("unknown operation {gate}")))?;
            if !records.is_empty() {
                return Err(err(l.no, l.value_col, "gates record nothing"));
            }
            Action::Gate { kind, qubits: words[1..].iter().map(|s| s.to_string()).collect() }
        }
    };
    Ok(Operation { action, when })
}

fn parse_relay(lines: &[Line], policy: NullPolicy) -> Result<RelaySpec> {
    let mut mechanism = None;
    let mut message = None;
    let mut hops = Vec::new();
    let mut times = BTreeMap::new();
    for l in lines {
        match l.key {
            "mechanism" => {
                mechanism = Some(
                    Mechanism::from_name(l.value)
                        .ok_or_else(|| err(l.no, l.value_col, format!("unknown mechanism {}", l.value)))?,
                )
            }
            "message" => {
                let bits = l
                    .value
                    .chars()
                    .enumerate()
                    .map(|(i, ch)| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(err(l.no, l.value_col + i, format!("message bit {ch} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<u8>>>()?;
                message = Some(bits);
            }
            "hop" => {
                let words: Vec<&str> = l.value.split_whitespace().collect();
                let [s, "->", r, rest @ ..] = &words[..] else {
                    return Err(err(l.no, l.value_col, "expected SENDER -> RECEIVER [BELL] [timelike]"));
                };
                let mut shared = Bell::PsiPlus;
                let mut spacelike = true;
                for w in rest {
                    if *w == "timelike" {
                        spacelike = false;
                    } else {
                        shared = Bell::from_label(w)
                            .ok_or_else(|| err(l.no, l.value_col, format!("unknown Bell state {w}")))?;
                    }
                }
                hops.push((s.to_string(), r.to_string(), shared, spacelike));
            }
            key => match key.strip_prefix("time.") {
                Some(agent) => {
                    let t: f64 =
                        l.value.parse().map_err(|_| err(l.no, l.value_col, format!("bad timestamp {}", l.value)))?;
                    times.insert(agent.to_string(), t);
                }
                None => return Err(err(l.no, 1, format!("unknown relay key {key}"))),
            },
        }
    }
    let first = lines.first().map_or(1, |l| l.no);
    let mechanism = mechanism.ok_or_else(|| err(first, 1, "[relay] has no mechanism"))?;
    let message = message.ok_or_else(|| err(first, 1, "[relay] has no message"))?;
    let hops = hops
        .into_iter()
        .map(|(s, r, shared, spacelike)| Hop { sender: s, receiver: r, shared, mechanism, spacelike })
        .collect();
    let spec = RelaySpec { hops, message, times, null_policy: policy };
    spec.validate()?;
    Ok(spec)
}

fn parse_assignments(text: &str, no: usize, col: usize) -> Result<Vec<(String, String)>> {
    text.split_whitespace()
        .map(|pair| {
            let (k, v) =
                pair.split_once('=').ok_or_else(|| err(no, col, format!("expected name=value, got {pair}")))?;
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

fn parse_expectation(l: &Line) -> Result<Expectation> {
    if let Some(p) = l.key.find("P(") {
        let frame = l.key[..p].trim().trim_end_matches(':').trim();
        let inner = l.key[p + 2..].trim_end().strip_suffix(')').ok_or_else(|| err(l.no, p + 1, "missing )"))?;
        let (outcome, context) = inner.split_once('|').unwrap_or((inner, ""));
        let value: f64 = l.value.parse().map_err(|_| err(l.no, l.value_col, format!("bad probability {}", l.value)))?;
        return Ok(Expectation::Probability {
            frame: (!frame.is_empty()).then(|| frame.to_string()),
            outcome: parse_assignments(outcome, l.no, p + 3)?,
            context: parse_assignments(context, l.no, p + 3)?,
            value,
        });
    }
    let boolean = |v: &str| match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err(l.no, l.value_col, format!("expected true or false, got {v}"))),
    };
    Ok(match l.key {
        "excluded" => Expectation::Excluded(
            l.value
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|ev| parse_assignments(ev, l.no, l.value_col).map(|v| v.into_iter().collect()))
                .collect::<Result<Vec<_>>>()?,
        ),
        "priority" => Expectation::Priority(l.value.to_string()),
        "decoded" => Expectation::Decoded(
            l.value
                .chars()
                .map(|c| {
                    c.to_digit(2).map(|d| d as u8).ok_or_else(|| err(l.no, l.value_col, "decoded must be a bit string"))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        "causal_past" => Expectation::CausalPast(boolean(l.value)?),
        "null" => Expectation::Null(boolean(l.value)?),
        other => return Err(err(l.no, 1, format!("unknown expectation {other}"))),
    })
}
