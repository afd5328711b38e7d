//! Scenario files and experiments through the library API.

use std::path::PathBuf;

use ctcsim::pctc::NullPolicy;
use ctcsim::scenario::{
    analyze_consistency, analyze_frames, brun_wilde_signaling_scenario, enumerate_frames, parse_scenario_file,
    parse_scenario_str, run_bhw, run_frame, run_relay, BhwInput, Expectation,
};
use ctcsim::state::{Ensemble, PureState, State};
use ctcsim::Error;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn scenario_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    v.sort();
    v
}

#[test]
fn corpus_scenarios_meet_their_expectations() {
    for path in scenario_files() {
        let file = parse_scenario_file(&path).unwrap();
        assert!(!file.expectations.is_empty(), "{}: no expectations", path.display());
        if let Some(spec) = &file.relay {
            let r = run_relay(spec).unwrap();
            for e in &file.expectations {
                match e {
                    Expectation::Decoded(bits) => assert_eq!(&r.decoded, bits, "{}", path.display()),
                    Expectation::CausalPast(b) => assert_eq!(r.causal_past, *b),
                    _ => {}
                }
            }
            continue;
        }
        let s = file.scenario.as_ref().unwrap();
        let report = analyze_frames(s).unwrap();
        for e in &file.expectations {
            match e {
                Expectation::Priority(f) => assert_eq!(report.priority_frame.as_ref(), Some(f), "{}", path.display()),
                Expectation::Excluded(keys) => {
                    let mut got = report.excluded.clone();
                    let mut want = keys.clone();
                    got.sort();
                    want.sort();
                    assert_eq!(got, want, "{}", path.display());
                }
                Expectation::Probability { frame, outcome, context, value } => {
                    let table = match frame {
                        Some(f) => report.table(f).unwrap(),
                        None => report.priority_table().unwrap(),
                    };
                    let o: Vec<(&str, &str)> = outcome.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
                    let c: Vec<(&str, &str)> = context.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
                    let p = table.conditional(&o, &c);
                    assert!((p - value).abs() < 1e-9, "{}: {o:?} | {c:?} = {p}, want {value}", path.display());
                }
                Expectation::Null(want) => {
                    let frame = file.frame.clone().unwrap();
                    let got = matches!(run_frame(s, &frame), Err(Error::NullProjection));
                    assert_eq!(got, *want, "{}", path.display());
                }
                _ => {}
            }
        }
    }
}

#[test]
fn proper_and_improper_mixtures_differ() {
    let proper =
        Ensemble::new(vec![(0.5, State::from(PureState::zero())), (0.5, State::from(PureState::one()))]).unwrap();
    let proper = run_bhw(&BhwInput::Ensemble(proper)).unwrap();
    let improper = run_bhw(&BhwInput::MaximallyMixed).unwrap();
    // Every member of the proper mixture is read as a = 0.
    assert!((proper.a[0] - 1.0).abs() < 1e-10);
    assert!((improper.a[0] - 0.5).abs() < 1e-10);
    assert!((proper.b[0] - 0.5).abs() < 1e-10);
}

#[test]
fn brun_wilde_signaling_forbids_mismatches_under_flag() {
    let s = brun_wilde_signaling_scenario().with_null_policy(NullPolicy::FlagForbidden);
    let r = analyze_consistency(&s).unwrap();
    let t = r.table("alice-first").unwrap();
    for force in ["0", "1"] {
        let p = t.conditional(&[("bob", force)], &[("force", force)]);
        assert!((p - 1.0).abs() < 1e-10, "force {force}: Pr = {p}");
    }
}

#[test]
fn inline_scenario_with_builtin_circuit() {
    let text = "\
[scenario]
name = inline
semantics = dctc
qubits = Q anc
prepare = plus(Q) zero(anc)
circuit = bhw: builtin:bhw
observables = a b

[agents]
bob = receiver

[events]
feed.agent = bob
feed.time = 1
feed.do = dctc bhw Q anc -> a b

[expect]
P(a=1) = 1
";
    let file = parse_scenario_str(text, None).unwrap();
    let s = file.scenario.unwrap();
    let frames = enumerate_frames(&s).unwrap();
    assert_eq!(frames.len(), 1);
    assert!(analyze_consistency(&s).is_err(), "nothing to compare without a spacelike pair");
    let t = run_frame(&s, &frames[0].label).unwrap();
    assert!((t.probability(&[("a", "1"), ("b", "0")]) - 1.0).abs() < 1e-10);
}

#[test]
fn scenario_errors_are_located() {
    let text = "[scenario]\nname = x\nsemantics = sideways\n";
    match parse_scenario_str(text, None) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let text = "[scenario]\nname = x\n[nonsense]\n";
    assert!(matches!(parse_scenario_str(text, None), Err(Error::Parse { line: 3, .. })));
}

#[test]
fn unordered_equal_times_are_rejected() {
    let text = "\
[scenario]
name = clash
semantics = dctc
qubits = A B
prepare = phi+(A,B)
observables = x y

[agents]
alice = observer
bob = observer

[events]
a.agent = alice
a.time = 1
a.do = measure A computational -> x
b.agent = bob
b.time = 1
b.do = measure B computational -> y
";
    let file = parse_scenario_str(text, None);
    let err = match file {
        Ok(f) => analyze_frames(f.scenario.as_ref().unwrap()).unwrap_err(),
        Err(e) => e,
    };
    assert!(err.to_string().contains("spacelike"), "{err}");
}
