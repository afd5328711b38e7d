//! Post-selection as teleportation: sample Bell measurements and keep only the
//! runs that land on the projected outcome.

use ctcsim::circuit::{assemble_unitary, Circuit, GateKind};
use ctcsim::pctc::{evolve_postselected, montecarlo_teleport, NullPolicy};
use ctcsim::state::{trace_distance, PureState, State};

fn main() -> ctcsim::Result<()> {
    let circuit = Circuit::new(1, 1).gate(GateKind::Swap, &[0, 1]);
    let u = assemble_unitary(&circuit)?;
    let input: State = PureState::plus().into();
    let exact = evolve_postselected(&input, &u, 1, NullPolicy::ErrorOnNull)?;
    let log = montecarlo_teleport(&input, &u, 1, 100_000, 7)?;
    println!("accepted {} of {} (analytic {:.4})", log.accepted, log.trials, log.analytic_weight);
    println!("Bell outcome histogram: {:?}", log.histogram);
    if let (Some(est), Some(want)) = (&log.conditional_state, &exact.state) {
        println!("conditional state off by {:.4}", trace_distance(est, &want.to_density())?);
    }
    Ok(())
}
