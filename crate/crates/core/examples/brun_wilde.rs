//! Forcing a measurement outcome with a post-selected CTC.

use ctcsim::pctc::NullPolicy;
use ctcsim::scenario::run_brun_wilde_force;
use ctcsim::state::{format_state, PureState};

fn main() -> ctcsim::Result<()> {
    let inputs = [("|+>", PureState::plus()), ("|0>", PureState::zero()), ("|1>", PureState::one())];
    for (name, psi) in inputs {
        for target in [0u8, 1] {
            let out = run_brun_wilde_force(&psi, target, NullPolicy::FlagForbidden)?;
            match out.state {
                Some(s) => print!("{name} forced to {target} (weight {:.3}):\n{}", out.weight, format_state(&s)),
                None => println!("{name} forced to {target}: null, the event cannot happen"),
            }
        }
    }
    Ok(())
}
