//! Frames, outcome tables and the exclusion analysis.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pctc::NullPolicy;
use crate::state::NULL_WEIGHT;

use super::engine::{compile, run_order, Compiled, NullMode};
use super::Scenario;

/// Events below this probability in some frame are excluded.
pub const EXCLUSION_THRESHOLD: f64 = 1e-12;

/// Reported alongside every analysis so readers know how priority is chosen.
pub const PRIORITY_RULE: &str = "support-containment: a frame has priority when every event it assigns nonzero \
     probability is nonzero in all frames; ties go to the first label in sort order";

/// Assignment of settings and observed records.
pub type EventKey = BTreeMap<String, String>;

/// One admissible total order of the events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub label: String,
    /// Event ids in execution order.
    pub order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub context: BTreeMap<String, String>,
    pub outcome: BTreeMap<String, String>,
    pub probability: f64,
}

impl TableEntry {
    pub fn key(&self) -> EventKey {
        self.context.iter().chain(&self.outcome).map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeTable {
    pub frame: String,
    pub entries: Vec<TableEntry>,
    /// Contexts in which every branch was post-selected away.
    pub forbidden_contexts: Vec<BTreeMap<String, String>>,
}

impl OutcomeTable {
    /// Total probability of entries matching every `(name, value)` pair.
    pub fn probability(&self, filter: &[(&str, &str)]) -> f64 {
        self.entries
            .iter()
            .filter(|e| {
                filter
                    .iter()
                    .all(|(k, v)| e.context.get(*k).or_else(|| e.outcome.get(*k)).map(String::as_str) == Some(*v))
            })
            .map(|e| e.probability)
            .sum()
    }

    /// Probability of the filter within the contexts matching it.
    pub fn conditional(&self, outcome: &[(&str, &str)], context: &[(&str, &str)]) -> f64 {
        let all: Vec<(&str, &str)> = outcome.iter().chain(context).copied().collect();
        let norm = self.probability(context);
        if norm <= 0.0 {
            return 0.0;
        }
        self.probability(&all) / norm
    }

    fn support(&self) -> BTreeSet<EventKey> {
        self.entries.iter().filter(|e| e.probability >= EXCLUSION_THRESHOLD).map(TableEntry::key).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub scenario: String,
    pub null_policy: NullPolicy,
    pub frames: Vec<Frame>,
    pub tables: Vec<OutcomeTable>,
    /// Events with nonzero probability in some frame and zero in another.
    pub excluded: Vec<EventKey>,
    pub priority_frame: Option<String>,
    /// Every frame satisfying the priority rule.
    pub admissible_frames: Vec<String>,
    pub consistent: bool,
    pub priority_rule: &'static str,
}

impl ConsistencyReport {
    pub fn table(&self, frame: &str) -> Option<&OutcomeTable> {
        self.tables.iter().find(|t| t.frame == frame)
    }

    pub fn priority_table(&self) -> Option<&OutcomeTable> {
        self.priority_frame.as_deref().and_then(|f| self.table(f))
    }

    /// Whether `excluded` equals the given set of events.
    pub fn excludes_exactly(&self, events: &[&[(&str, &str)]]) -> bool {
        let want: BTreeSet<EventKey> =
            events.iter().map(|ev| ev.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()).collect();
        let got: BTreeSet<EventKey> = self.excluded.iter().cloned().collect();
        want == got
    }
}

/// All total orders compatible with the declared causal structure.
///
/// Two events are ordered by timestamp unless declared spacelike-separated.
/// Frames are returned sorted by label.
pub fn enumerate_frames(s: &Scenario) -> Result<Vec<Frame>> {
    let n = s.events.len();
    let pairs = s.spacelike_pairs()?;
    let spacelike = |i: usize, j: usize| pairs.contains(&(i.min(j), i.max(j)));
    let before = |i: usize, j: usize| !spacelike(i, j) && s.events[i].time < s.events[j].time;

    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.sort_by(|&a, &b| {
        s.events[a].time.total_cmp(&s.events[b].time).then_with(|| s.events[a].id.cmp(&s.events[b].id))
    });

    let mut orders = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    extend(&candidates, &before, &mut placed, &mut current, &mut orders);

    let involved: BTreeSet<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    let single = (pairs.len() == 1).then(|| *pairs.iter().next().unwrap());
    let mut frames: Vec<Frame> = orders
        .iter()
        .map(|order| {
            let label = match single {
                Some((i, j)) if s.events[i].agent != s.events[j].agent => {
                    let first = order.iter().find(|&&e| e == i || e == j).unwrap();
                    format!("{}-first", s.events[*first].agent)
                }
                _ => order
                    .iter()
                    .filter(|e| involved.contains(e))
                    .map(|&e| s.events[e].id.as_str())
                    .collect::<Vec<_>>()
                    .join("<"),
            };
            Frame { label, order: order.iter().map(|&e| s.events[e].id.clone()).collect() }
        })
        .collect();
    frames.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(frames)
}

fn extend(
    candidates: &[usize],
    before: &dyn Fn(usize, usize) -> bool,
    placed: &mut [bool],
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == candidates.len() {
        out.push(current.clone());
        return;
    }
    for &e in candidates {
        if placed[e] || candidates.iter().any(|&p| !placed[p] && p != e && before(p, e)) {
            continue;
        }
        placed[e] = true;
        current.push(e);
        extend(candidates, before, placed, current, out);
        current.pop();
        placed[e] = false;
    }
}

fn contexts(s: &Scenario, honor_pins: bool) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for setting in &s.settings {
        let values: Vec<&String> = match s.pinned.get(&setting.name) {
            Some(v) if honor_pins => vec![v],
            _ => setting.values.iter().collect(),
        };
        out = out
            .into_iter()
            .flat_map(|ctx| {
                values.iter().map(move |v| {
                    let mut c = ctx.clone();
                    c.insert(setting.name.clone(), (*v).clone());
                    c
                })
            })
            .collect();
    }
    out
}

fn table_for(
    s: &Scenario,
    compiled: &Compiled,
    frame: &Frame,
    contexts: &[BTreeMap<String, String>],
    mode: NullMode,
) -> Result<OutcomeTable> {
    let order: Vec<usize> = frame.order.iter().map(|id| s.event_index(id).unwrap()).collect();
    let records: Vec<&String> = s.observables.iter().filter(|o| s.setting_named(o).is_none()).collect();
    let per_context = contexts
        .par_iter()
        .map(|ctx| {
            let branches = run_order(s, compiled, &order, ctx, mode)?;
            let mut acc: BTreeMap<BTreeMap<String, String>, f64> = BTreeMap::new();
            for b in &branches {
                let outcome = records
                    .iter()
                    .map(|r| ((*r).clone(), b.vars.get(*r).cloned().unwrap_or_else(|| "none".into())))
                    .collect();
                *acc.entry(outcome).or_default() += b.prob;
            }
            Ok((ctx.clone(), acc))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries = Vec::new();
    let mut forbidden = Vec::new();
    for (ctx, acc) in per_context {
        let total: f64 = acc.values().sum();
        if total < NULL_WEIGHT {
            forbidden.push(ctx);
            continue;
        }
        for (outcome, p) in acc {
            entries.push(TableEntry { context: ctx.clone(), outcome, probability: p / total });
        }
    }
    Ok(OutcomeTable { frame: frame.label.clone(), entries, forbidden_contexts: forbidden })
}

fn find_frame<'a>(frames: &'a [Frame], label: &str) -> Result<&'a Frame> {
    frames.iter().find(|f| f.label == label).ok_or_else(|| {
        let known: Vec<&str> = frames.iter().map(|f| f.label.as_str()).collect();
        Error::Scenario(format!("unknown frame {label}; available: {}", known.join(", ")))
    })
}

/// Runs one frame with the pinned setting values (all values of unpinned
/// settings). A null projection aborts under [`NullPolicy::ErrorOnNull`] and
/// removes the branch under [`NullPolicy::FlagForbidden`].
pub fn run_frame(s: &Scenario, frame: &str) -> Result<OutcomeTable> {
    let compiled = compile(s)?;
    let frames = enumerate_frames(s)?;
    let f = find_frame(&frames, frame)?;
    let mode = match s.null_policy {
        NullPolicy::ErrorOnNull => NullMode::Fail,
        NullPolicy::FlagForbidden => NullMode::Forbid,
    };
    table_for(s, &compiled, f, &contexts(s, true), mode)
}

/// Computes every frame's table and the exclusion analysis without failing on
/// an inconsistent result.
///
/// Under [`NullPolicy::ErrorOnNull`] a null projection means the interaction
/// did not occur and the branch continues; under
/// [`NullPolicy::FlagForbidden`] null branches are removed and the rest are
/// reweighted by their post-selection weight.
pub fn analyze_frames(s: &Scenario) -> Result<ConsistencyReport> {
    let compiled = compile(s)?;
    if s.spacelike_pairs()?.is_empty() {
        return Err(Error::Scenario(format!("{}: no spacelike-separated events to compare", s.name)));
    }
    let frames = enumerate_frames(s)?;
    let ctxs = contexts(s, false);
    let mode = match s.null_policy {
        NullPolicy::ErrorOnNull => NullMode::Continue,
        NullPolicy::FlagForbidden => NullMode::Forbid,
    };
    let tables = frames.par_iter().map(|f| table_for(s, &compiled, f, &ctxs, mode)).collect::<Result<Vec<_>>>()?;

    let supports: Vec<BTreeSet<EventKey>> = tables.iter().map(OutcomeTable::support).collect();
    let union: BTreeSet<EventKey> = supports.iter().flatten().cloned().collect();
    let common: BTreeSet<EventKey> =
        union.iter().filter(|e| supports.iter().all(|sup| sup.contains(*e))).cloned().collect();
    let excluded: Vec<EventKey> = union.difference(&common).cloned().collect();
    let admissible: Vec<String> =
        tables.iter().zip(&supports).filter(|(_, sup)| sup.is_subset(&common)).map(|(t, _)| t.frame.clone()).collect();
    Ok(ConsistencyReport {
        scenario: s.name.clone(),
        null_policy: s.null_policy,
        frames,
        tables,
        excluded,
        priority_frame: admissible.first().cloned(),
        consistent: !admissible.is_empty(),
        admissible_frames: admissible,
        priority_rule: PRIORITY_RULE,
    })
}

/// Like [`analyze_frames`] but fails when no frame has priority.
pub fn analyze_consistency(s: &Scenario) -> Result<ConsistencyReport> {
    let report = analyze_frames(s)?;
    if !report.consistent {
        return Err(Error::Inconsistent(format!("no frame of {} avoids every excluded event", s.name)));
    }
    Ok(report)
}
