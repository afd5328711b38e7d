//! Building a scenario in code and comparing its frames.

use ctcsim::circuit::bhw_circuit;
use ctcsim::scenario::{analyze_frames, BasisSpec, Event, Operation, Prep, Scenario, Semantics};
use ctcsim::state::Bell;

fn main() -> ctcsim::Result<()> {
    // Alice measures in a chosen basis; Bob feeds his half into the BHW
    // circuit. The two events are spacelike-separated.
    let s = Scenario::new("example", Semantics::Dctc)
        .agent("alice", "sender")
        .agent("bob", "receiver")
        .qubits(&["A", "B", "anc"])
        .prepare(Prep::Bell(Bell::PsiPlus), &["A", "B"])
        .prepare(Prep::Zero, &["anc"])
        .setting("basis", &["computational", "diagonal"])
        .circuit("bhw", bhw_circuit())
        .event(
            Event::new("measure", "alice", 2.0)
                .op(Operation::measure("A", BasisSpec::Variable("basis".into()), "alice"))
                .spacelike_to("feed"),
        )
        .event(Event::new("feed", "bob", 1.0).op(Operation::interaction("bhw", &["B", "anc"], &["a", "b"])))
        .observe(&["basis", "a"]);
    let report = analyze_frames(&s)?;
    for table in &report.tables {
        for basis in ["computational", "diagonal"] {
            let p = table.conditional(&[("a", "1")], &[("basis", basis)]).max(0.0);
            println!("{:<12} {basis:<14} P(a=1) = {p:.3}", table.frame);
        }
    }
    println!("consistent: {}, priority: {:?}", report.consistent, report.priority_frame);
    Ok(())
}
