//! Command-line front end for the `ctcsim` binary.
//!
//! Exit codes: 0 on success, 1 on a physics-level failure (null projection,
//! inconsistency, solver non-convergence, zero acceptance, failed
//! expectation), 2 on input errors. Every report embeds the resolved
//! configuration, including generated seeds.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{assemble_unitary, parse_circuit, validate, Circuit};
use crate::dctc::solve_fixed_point;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::pctc::{evolve_postselected, montecarlo_teleport, NullPolicy};
use crate::scenario::{
    analyze_frames, parse_scenario_file, run_frame, run_relay, ConsistencyReport, EventKey, Expectation, OutcomeTable,
    RelayResult, Scenario, ScenarioFile,
};
use crate::state::{parse_state, Bell, DensityState, PureState, State};

/// Tolerance for probability expectations in scenario files.
pub const EXPECT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Error,
    Flag,
}

#[derive(Debug, Parser)]
#[command(name = "ctcsim", version, about = "Quantum circuits with closed-timelike-curve semantics")]
pub struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (generated and logged when absent)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trial count
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Meaning of a null post-selection
    #[arg(long, value_enum, global = true)]
    null_policy: Option<PolicyArg>,
    /// Frame label, or `all` for the consistency analysis
    #[arg(long, global = true)]
    frame: Option<String>,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Run a scenario file
    Run { scenario: PathBuf },
    /// Solve the D-CTC fixed point of a circuit for a CR state
    FixedPoint { circuit: PathBuf, state: PathBuf },
    /// Compare every frame of a scenario
    Consistency { scenario: PathBuf },
    /// Sample the post-selected construction by teleportation trials
    Montecarlo { circuit: PathBuf, state: PathBuf },
    /// Check circuits, states and scenario expectations
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Run,
    FixedPoint,
    Consistency,
    Montecarlo,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::FixedPoint => "fixed-point",
            Command::Consistency => "consistency",
            Command::Montecarlo => "montecarlo",
            Command::Validate => "validate",
        }
    }
}

/// Resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub null_policy: Option<NullPolicy>,
    pub frame: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command, inputs: Vec<PathBuf>) -> Self {
        RunConfig {
            command,
            inputs,
            out: None,
            format: Format::Json,
            seed: None,
            trials: None,
            null_policy: None,
            frame: None,
        }
    }

    pub fn from_cli(cli: Cli) -> Self {
        let (command, inputs) = match cli.command {
            CommandArgs::Run { scenario } => (Command::Run, vec![scenario]),
            CommandArgs::FixedPoint { circuit, state } => (Command::FixedPoint, vec![circuit, state]),
            CommandArgs::Consistency { scenario } => (Command::Consistency, vec![scenario]),
            CommandArgs::Montecarlo { circuit, state } => (Command::Montecarlo, vec![circuit, state]),
            CommandArgs::Validate { files } => (Command::Validate, files),
        };
        RunConfig {
            command,
            inputs,
            out: cli.out,
            format: cli.format,
            seed: cli.seed,
            trials: cli.trials,
            null_policy: cli.null_policy.map(|p| match p {
                PolicyArg::Error => NullPolicy::ErrorOnNull,
                PolicyArg::Flag => NullPolicy::FlagForbidden,
            }),
            frame: cli.frame,
        }
    }

    /// Checks the flag combination and that every input exists.
    pub fn check(&self) -> Result<()> {
        match (self.command, self.trials) {
            (Command::Montecarlo, None) => return Err(Error::Scenario("montecarlo requires --trials".into())),
            (Command::Montecarlo, Some(0)) => return Err(Error::Scenario("--trials must be at least 1".into())),
            (c, Some(_)) if c != Command::Montecarlo => {
                return Err(Error::Scenario(format!("--trials only applies to montecarlo, not {}", c.name())))
            }
            _ => {}
        }
        if let Some(p) = self.inputs.iter().find(|p| !p.is_file()) {
            return Err(Error::Io(format!("{}: no such file", p.display())));
        }
        Ok(())
    }
}

/// Result of one invocation: the exit code and the report to emit.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    file: String,
    check: String,
    expected: String,
    observed: String,
    pass: bool,
}

fn status_of(e: &Error) -> Option<&'static str> {
    match e {
        Error::NullProjection => Some("null-projection"),
        Error::Inconsistent(_) => Some("inconsistent"),
        Error::NoConvergence { .. } => Some("no-convergence"),
        _ => None,
    }
}

fn envelope(config: &RunConfig, status: &str, result: Value) -> Value {
    json!({
        "command": config.command.name(),
        "config": config,
        "status": status,
        "result": result,
    })
}

/// Physics failures become a report with exit code 1; input errors propagate.
fn physics(config: &RunConfig, e: Error) -> Result<Outcome> {
    match status_of(&e) {
        Some(status) => {
            let mut report = envelope(config, status, Value::Null);
            report["message"] = json!(e.to_string());
            if let Error::NoConvergence { residual } = e {
                report["residual"] = json!(if residual.is_finite() { json!(residual) } else { json!("inf") });
            }
            Ok(Outcome { code: 1, report })
        }
        None => Err(e),
    }
}

/// Executes a resolved configuration. `Err` means an input error (exit 2).
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    config.check()?;
    match config.command {
        Command::Run => cmd_run(config),
        Command::FixedPoint => cmd_fixedpoint(config),
        Command::Consistency => cmd_consistency(config),
        Command::Montecarlo => cmd_montecarlo(config),
        Command::Validate => cmd_validate(config),
    }
}

/// Fills in the null policy and frame the scenario file supplies.
fn resolved(config: &RunConfig, file: &ScenarioFile, frame: Option<&str>) -> RunConfig {
    let mut r = config.clone();
    let policy = file.scenario.as_ref().map(|s| s.null_policy).or(file.relay.as_ref().map(|x| x.null_policy));
    r.null_policy = r.null_policy.or(policy);
    if let Some(f) = frame {
        r.frame = Some(f.to_string());
    }
    r
}

fn load_scenario(config: &RunConfig) -> Result<ScenarioFile> {
    let mut file = parse_scenario_file(&config.inputs[0])?;
    if let Some(p) = config.null_policy {
        if let Some(s) = &mut file.scenario {
            s.null_policy = p;
        }
        if let Some(r) = &mut file.relay {
            r.null_policy = p;
        }
    }
    Ok(file)
}

fn file_label(config: &RunConfig) -> String {
    config.inputs[0].display().to_string()
}

pub fn cmd_run(config: &RunConfig) -> Result<Outcome> {
    let file = load_scenario(config)?;
    let label = file_label(config);
    let frame = config.frame.clone().or_else(|| file.frame.clone()).unwrap_or_else(|| "all".into());
    let config = &resolved(config, &file, file.relay.is_none().then_some(frame.as_str()));
    if let Some(relay) = &file.relay {
        return match run_relay(relay) {
            Ok(r) => Ok(relay_outcome(config, &label, &file, r)),
            Err(e) => physics(config, e),
        };
    }
    let scenario = file.scenario.as_ref().expect("event scenario");
    if frame == "all" {
        return consistency_outcome(config, &label, &file, scenario);
    }
    match run_frame(scenario, &frame) {
        Ok(table) => {
            let checks = table_checks(&label, &file, &table);
            let pass = checks.iter().all(|c| c.pass);
            let mut report =
                envelope(config, if pass { "ok" } else { "expectation-failed" }, json!({ "table": table }));
            report["expected"] = json!(checks);
            Ok(Outcome { code: if pass { 0 } else { 1 }, report })
        }
        Err(e) => physics(config, e),
    }
}

pub fn cmd_consistency(config: &RunConfig) -> Result<Outcome> {
    let file = load_scenario(config)?;
    let label = file_label(config);
    let config = &resolved(config, &file, file.relay.is_none().then_some("all"));
    if let Some(relay) = &file.relay {
        return match run_relay(relay) {
            Ok(r) => Ok(relay_outcome(config, &label, &file, r)),
            Err(e) => physics(config, e),
        };
    }
    consistency_outcome(config, &label, &file, file.scenario.as_ref().expect("event scenario"))
}

fn consistency_outcome(config: &RunConfig, label: &str, file: &ScenarioFile, s: &Scenario) -> Result<Outcome> {
    let report = match analyze_frames(s) {
        Ok(r) => r,
        Err(e) => return physics(config, e),
    };
    let checks = consistency_checks(label, file, s, &report);
    let pass = checks.iter().all(|c| c.pass);
    let status = if !report.consistent {
        "inconsistent"
    } else if !pass {
        "expectation-failed"
    } else {
        "ok"
    };
    let mut out = envelope(config, status, json!({ "consistency": report }));
    out["expected"] = json!(checks);
    Ok(Outcome { code: if status == "ok" { 0 } else { 1 }, report: out })
}

fn relay_outcome(config: &RunConfig, label: &str, file: &ScenarioFile, r: RelayResult) -> Outcome {
    let checks = relay_checks(label, file, &r);
    let pass = checks.iter().all(|c| c.pass);
    let mut report = envelope(config, if pass { "ok" } else { "expectation-failed" }, json!({ "relay": r }));
    report["expected"] = json!(checks);
    Outcome { code: if pass { 0 } else { 1 }, report }
}

fn fmt_key(k: &EventKey) -> String {
    k.iter().map(|(a, b)| format!("{a}={b}")).collect::<Vec<_>>().join(" ")
}

fn fmt_pairs(p: &[(String, String)]) -> String {
    p.iter().map(|(a, b)| format!("{a}={b}")).collect::<Vec<_>>().join(" ")
}

fn probability_check(
    label: &str,
    table: &OutcomeTable,
    outcome: &[(String, String)],
    context: &[(String, String)],
    value: f64,
) -> Check {
    let o: Vec<(&str, &str)> = outcome.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let c: Vec<(&str, &str)> = context.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let observed = table.conditional(&o, &c) + 0.0;
    Check {
        file: label.into(),
        check: format!("{}: P({} | {})", table.frame, fmt_pairs(outcome), fmt_pairs(context)),
        expected: value.to_string(),
        observed: observed.to_string(),
        pass: (observed - value).abs() <= EXPECT_TOL,
    }
}

/// Checks that apply to a single-frame run.
fn table_checks(label: &str, file: &ScenarioFile, table: &OutcomeTable) -> Vec<Check> {
    file.expectations
        .iter()
        .filter_map(|e| match e {
            Expectation::Probability { frame, outcome, context, value }
                if frame.as_deref().is_none_or(|f| f == table.frame) =>
            {
                let pinned_match = context
                    .iter()
                    .all(|(k, v)| table.entries.iter().any(|en| en.context.get(k).is_none_or(|x| x == v)));
                pinned_match.then(|| probability_check(label, table, outcome, context, *value))
            }
            _ => None,
        })
        .collect()
}

fn consistency_checks(label: &str, file: &ScenarioFile, s: &Scenario, report: &ConsistencyReport) -> Vec<Check> {
    let mut checks = Vec::new();
    for e in &file.expectations {
        match e {
            Expectation::Probability { frame, outcome, context, value } => {
                let table = match frame {
                    Some(f) => report.table(f),
                    None => report.priority_table(),
                };
                match table {
                    Some(t) => checks.push(probability_check(label, t, outcome, context, *value)),
                    None => checks.push(Check {
                        file: label.into(),
                        check: format!("P({} | {})", fmt_pairs(outcome), fmt_pairs(context)),
                        expected: value.to_string(),
                        observed: format!("no frame {}", frame.as_deref().unwrap_or("with priority")),
                        pass: false,
                    }),
                }
            }
            Expectation::Excluded(events) => {
                let want: std::collections::BTreeSet<&EventKey> = events.iter().collect();
                let got: std::collections::BTreeSet<&EventKey> = report.excluded.iter().collect();
                checks.push(Check {
                    file: label.into(),
                    check: "excluded".into(),
                    expected: events.iter().map(fmt_key).collect::<Vec<_>>().join("; "),
                    observed: report.excluded.iter().map(fmt_key).collect::<Vec<_>>().join("; "),
                    pass: want == got,
                });
            }
            Expectation::Priority(f) => checks.push(Check {
                file: label.into(),
                check: "priority".into(),
                expected: f.clone(),
                observed: report.priority_frame.clone().unwrap_or_else(|| "none".into()),
                pass: report.priority_frame.as_deref() == Some(f.as_str()),
            }),
            Expectation::Null(want) => {
                let frame = file.frame.clone().or_else(|| report.priority_frame.clone()).unwrap_or_default();
                let mut pinned = s.clone();
                pinned.null_policy = NullPolicy::ErrorOnNull;
                let got = matches!(run_frame(&pinned, &frame), Err(Error::NullProjection));
                checks.push(Check {
                    file: label.into(),
                    check: format!("null in {frame}"),
                    expected: want.to_string(),
                    observed: got.to_string(),
                    pass: got == *want,
                });
            }
            Expectation::Decoded(_) | Expectation::CausalPast(_) => checks.push(Check {
                file: label.into(),
                check: "relay expectation".into(),
                expected: "a [relay] section".into(),
                observed: "event scenario".into(),
                pass: false,
            }),
        }
    }
    checks
}

fn bits(b: &[u8]) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

fn relay_checks(label: &str, file: &ScenarioFile, r: &RelayResult) -> Vec<Check> {
    file.expectations
        .iter()
        .map(|e| match e {
            Expectation::Decoded(d) => Check {
                file: label.into(),
                check: "decoded".into(),
                expected: bits(d),
                observed: bits(&r.decoded),
                pass: *d == r.decoded,
            },
            Expectation::CausalPast(c) => Check {
                file: label.into(),
                check: "causal_past".into(),
                expected: c.to_string(),
                observed: r.causal_past.to_string(),
                pass: *c == r.causal_past,
            },
            other => Check {
                file: label.into(),
                check: format!("{other:?}"),
                expected: "an event scenario".into(),
                observed: "relay".into(),
                pass: false,
            },
        })
        .collect()
}

/// Reads a circuit and a CR state, filling in the circuit's `init` wires
/// when the state omits them.
fn load_circuit_and_state(config: &RunConfig) -> Result<(Circuit, CMatrix, State)> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
    let circuit = parse_circuit(&read(&config.inputs[0])?)?;
    if circuit.ctc_wires == 0 {
        return Err(Error::Circuit("circuit declares no CTC wires".into()));
    }
    let u = assemble_unitary(&circuit)?;
    let state = parse_state(&read(&config.inputs[1])?)?;
    let state = complete_cr_state(&circuit, state)?;
    Ok((circuit, u, state))
}

fn complete_cr_state(circuit: &Circuit, state: State) -> Result<State> {
    let n = circuit.cr_wires;
    if state.qubits() == n {
        return Ok(state);
    }
    let free: Vec<usize> = (0..n).filter(|w| !circuit.inits.iter().any(|(i, _)| i == w)).collect();
    if state.qubits() != free.len() {
        return Err(Error::Dimension(format!(
            "state has {} qubit(s); the circuit needs {n}, or {} besides its init wires",
            state.qubits(),
            free.len()
        )));
    }
    let init_bits: BTreeMap<usize, u8> = circuit.inits.iter().copied().collect();
    let dim = 1usize << n;
    // Full index -> index into the given state, when the init wires match.
    let sub = |full: usize| -> Option<usize> {
        let bit = |w: usize| (full >> (n - 1 - w)) & 1;
        if init_bits.iter().any(|(&w, &b)| bit(w) != b as usize) {
            return None;
        }
        Some(free.iter().fold(0, |acc, &w| (acc << 1) | bit(w)))
    };
    Ok(match state {
        State::Pure(p) => {
            let a = p.amplitudes();
            let v = CVector::from_fn(dim, |i, _| sub(i).map_or(linalg::ZERO, |s| a[s]));
            State::Pure(PureState::new(v)?)
        }
        State::Density(rho) => {
            let m = rho.matrix();
            let full = CMatrix::from_fn(dim, dim, |i, j| match (sub(i), sub(j)) {
                (Some(a), Some(b)) => m[(a, b)],
                _ => linalg::ZERO,
            });
            State::Density(DensityState::new(full)?)
        }
    })
}

pub fn cmd_fixedpoint(config: &RunConfig) -> Result<Outcome> {
    let (_, u, state) = load_circuit_and_state(config)?;
    match solve_fixed_point(&state.to_density(), &u) {
        Ok(fp) => Ok(Outcome { code: 0, report: envelope(config, "ok", json!({ "fixed_point": fp })) }),
        Err(e) => physics(config, e),
    }
}

pub fn cmd_montecarlo(config: &RunConfig) -> Result<Outcome> {
    let (circuit, u, state) = load_circuit_and_state(config)?;
    let mut resolved = config.clone();
    let seed = *resolved.seed.get_or_insert_with(rand::random::<u64>);
    let trials = config.trials.expect("checked");
    let log = montecarlo_teleport(&state, &u, circuit.ctc_wires, trials, seed)?;
    let analytic = evolve_postselected(&state, &u, circuit.ctc_wires, NullPolicy::FlagForbidden)?;
    let conditional_distance = match (&log.conditional_state, &analytic.state) {
        (Some(est), Some(exact)) => Some(crate::state::trace_distance(est, &exact.to_density())?),
        _ => None,
    };
    let sigma = (log.analytic_weight * (1.0 - log.analytic_weight) / trials as f64).sqrt();
    let labels: Vec<String> = (0..log.histogram.len()).map(|o| outcome_label(o, circuit.ctc_wires)).collect();
    let zero = log.accepted == 0;
    let result = json!({
        "log": log,
        "acceptance_frequency": log.acceptance_frequency(),
        "binomial_sigma": sigma,
        "outcome_labels": labels,
        "conditional_trace_distance": conditional_distance,
    });
    Ok(Outcome {
        code: if zero { 1 } else { 0 },
        report: envelope(&resolved, if zero { "zero-acceptance" } else { "ok" }, result),
    })
}

fn outcome_label(o: usize, pairs: usize) -> String {
    (0..pairs).map(|i| Bell::ALL[(o >> (2 * (pairs - 1 - i))) & 3].label()).collect::<Vec<_>>().join(",")
}

pub fn cmd_validate(config: &RunConfig) -> Result<Outcome> {
    let mut checks = Vec::new();
    for path in &config.inputs {
        let label = path.display().to_string();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        match ext {
            "ctc" => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{label}: {e}")))?;
                let circuit = parse_circuit(&text).map_err(|e| Error::Scenario(format!("{label}: {e}")))?;
                let diags = validate(&circuit);
                checks.push(Check {
                    file: label.clone(),
                    check: "diagnostics".into(),
                    expected: "none".into(),
                    observed: if diags.is_empty() {
                        "none".into()
                    } else {
                        diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
                    },
                    pass: diags.is_empty(),
                });
            }
            "state" => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{label}: {e}")))?;
                parse_state(&text).map_err(|e| Error::Scenario(format!("{label}: {e}")))?;
                checks.push(Check {
                    file: label,
                    check: "parses".into(),
                    expected: "true".into(),
                    observed: "true".into(),
                    pass: true,
                });
            }
            "scn" => {
                let mut sub = config.clone();
                sub.command = Command::Consistency;
                sub.inputs = vec![path.clone()];
                let outcome = cmd_consistency(&sub)?;
                match outcome.report.get("expected").and_then(Value::as_array) {
                    Some(list) if !list.is_empty() => {
                        for c in list {
                            checks.push(serde_json::from_value::<CheckIn>(c.clone()).expect("own output").into());
                        }
                    }
                    _ => checks.push(Check {
                        file: label,
                        check: "status".into(),
                        expected: "ok".into(),
                        observed: outcome.report["status"].as_str().unwrap_or("").into(),
                        pass: outcome.code == 0,
                    }),
                }
            }
            other => return Err(Error::Scenario(format!("{label}: unknown file type .{other}"))),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let report = envelope(config, if pass { "ok" } else { "expectation-failed" }, json!({ "checks": checks }));
    Ok(Outcome { code: if pass { 0 } else { 1 }, report })
}

#[derive(serde::Deserialize)]
struct CheckIn {
    file: String,
    check: String,
    expected: String,
    observed: String,
    pass: bool,
}

impl From<CheckIn> for Check {
    fn from(c: CheckIn) -> Self {
        Check { file: c.file, check: c.check, expected: c.expected, observed: c.observed, pass: c.pass }
    }
}

/// CSV columns for each report kind, matching `schemas/csv_columns.json`.
pub fn csv_columns(report: &Value) -> &'static [&'static str] {
    let result = &report["result"];
    if result.get("table").is_some() || result.get("consistency").is_some() {
        &["frame", "context", "outcome", "probability"]
    } else if result.get("fixed_point").is_some() {
        &["row", "col", "re", "im"]
    } else if result.get("log").is_some() {
        &["index", "label", "count"]
    } else if result.get("relay").is_some() {
        &["index", "sent", "decoded", "probability"]
    } else if result.get("checks").is_some() {
        &["file", "check", "expected", "observed", "pass"]
    } else {
        &["status", "message"]
    }
}

fn assignments(v: &Value) -> String {
    v.as_object()
        .map(|m| m.iter().map(|(k, x)| format!("{k}={}", x.as_str().unwrap_or(""))).collect::<Vec<_>>().join(";"))
        .unwrap_or_default()
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_rows(report: &Value) -> Vec<Vec<String>> {
    let result = &report["result"];
    let table_rows = |t: &Value| -> Vec<Vec<String>> {
        t["entries"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|e| {
                vec![cell(&t["frame"]), assignments(&e["context"]), assignments(&e["outcome"]), cell(&e["probability"])]
            })
            .collect()
    };
    if let Some(t) = result.get("table") {
        table_rows(t)
    } else if let Some(c) = result.get("consistency") {
        c["tables"].as_array().into_iter().flatten().flat_map(table_rows).collect()
    } else if let Some(fp) = result.get("fixed_point") {
        let mut rows = Vec::new();
        for (r, row) in fp["rho_ctc"].as_array().into_iter().flatten().enumerate() {
            for (c, z) in row.as_array().into_iter().flatten().enumerate() {
                rows.push(vec![r.to_string(), c.to_string(), cell(&z[0]), cell(&z[1])]);
            }
        }
        rows
    } else if let Some(log) = result.get("log") {
        log["histogram"]
            .as_array()
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(i, n)| vec![i.to_string(), cell(&result["outcome_labels"][i]), cell(n)])
            .collect()
    } else if let Some(r) = result.get("relay") {
        (0..r["message"].as_array().map_or(0, Vec::len))
            .map(|i| {
                vec![i.to_string(), cell(&r["message"][i]), cell(&r["decoded"][i]), cell(&r["bit_probabilities"][i])]
            })
            .collect()
    } else if let Some(checks) = result.get("checks") {
        checks
            .as_array()
            .into_iter()
            .flatten()
            .map(|c| ["file", "check", "expected", "observed", "pass"].iter().map(|k| cell(&c[*k])).collect())
            .collect()
    } else {
        vec![vec![cell(&report["status"]), cell(&report["message"])]]
    }
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(csv_columns(report)).expect("in-memory write");
            for row in csv_rows(report) {
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
        }
        Format::Text => render_text(report),
    }
}

fn render_text(report: &Value) -> String {
    let mut out =
        format!("{} [{}]\n", report["command"].as_str().unwrap_or(""), report["status"].as_str().unwrap_or(""));
    if let Some(m) = report.get("message").and_then(Value::as_str) {
        out += &format!("  {m}\n");
    }
    let result = &report["result"];
    if let Some(c) = result.get("consistency") {
        out += &format!(
            "  priority frame: {}\n  excluded: {}\n",
            c["priority_frame"].as_str().unwrap_or("none"),
            c["excluded"].as_array().map_or(0, Vec::len)
        );
    }
    if let Some(fp) = result.get("fixed_point") {
        out += &format!(
            "  residual {}  entropy {}  degenerate {}\n",
            cell(&fp["residual"]),
            cell(&fp["entropy"]),
            cell(&fp["degenerate"])
        );
    }
    if let Some(log) = result.get("log") {
        out += &format!(
            "  accepted {}/{} (analytic weight {}), seed {}\n",
            cell(&log["accepted"]),
            cell(&log["trials"]),
            cell(&log["analytic_weight"]),
            cell(&log["seed"])
        );
    }
    let cols = csv_columns(report);
    if result.get("fixed_point").is_none() && result.get("log").is_none() && !result.is_null() {
        for row in csv_rows(report) {
            let parts: Vec<String> = cols.iter().zip(&row).map(|(c, v)| format!("{c}: {v}")).collect();
            out += &format!("  {}\n", parts.join("  "));
        }
    }
    if let Some(checks) = report.get("expected").and_then(Value::as_array) {
        for c in checks {
            let mark = if c["pass"].as_bool() == Some(true) { "ok  " } else { "FAIL" };
            out += &format!(
                "  {mark} {}: expected {}, observed {}\n",
                cell(&c["check"]),
                cell(&c["expected"]),
                cell(&c["observed"])
            );
        }
    }
    out
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = RunConfig::from_cli(cli);
    let outcome = match execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("ctcsim: {e}");
            return 2;
        }
    };
    let text = render(&outcome.report, config.format);
    let written = match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("ctcsim: {e}");
        return 2;
    }
    if outcome.code != 0 {
        if let Some(m) = outcome.report.get("message").and_then(Value::as_str) {
            eprintln!("ctcsim: {m}");
        }
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_only_with_montecarlo() {
        let mut c = RunConfig::new(Command::Montecarlo, vec![]);
        assert!(c.check().is_err());
        c.trials = Some(10);
        assert!(c.check().is_ok());
        let mut r = RunConfig::new(Command::Run, vec![]);
        r.trials = Some(10);
        assert!(r.check().is_err());
    }

    #[test]
    fn init_wires_are_filled_in() {
        let c = crate::circuit::bhw_circuit();
        let s = complete_cr_state(&c, State::Pure(PureState::minus())).unwrap();
        let want = PureState::minus().tensor(&PureState::zero()).unwrap();
        assert!((s.as_pure().unwrap().fidelity(&want) - 1.0).abs() < 1e-12);
        let d = complete_cr_state(&c, State::Density(DensityState::maximally_mixed(1).unwrap())).unwrap();
        assert!((d.to_density().probability_of(&[1], &[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outcome_labels() {
        assert_eq!(outcome_label(0, 1), "phi+");
        assert_eq!(outcome_label(0b1101, 2), "psi-,phi-");
    }
}
