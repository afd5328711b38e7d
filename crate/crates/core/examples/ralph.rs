//! Alice's phase flip is visible in Bob's diagonal measurement when her half of
//! the shared pair goes through a post-selected CTC.

use ctcsim::pctc::NullPolicy;
use ctcsim::scenario::{analyze_consistency, ralph_scenario, run_ralph, RalphInput};
use ctcsim::state::format_state;

fn main() -> ctcsim::Result<()> {
    for flip in [false, true] {
        let out = run_ralph(RalphInput::Entangled, flip, NullPolicy::ErrorOnNull)?;
        print!("phase flip {flip}, state on (B, 2):\n{}", format_state(out.state.as_ref().unwrap()));
    }
    for plus in [true, false] {
        for flip in [false, true] {
            let out = run_ralph(RalphInput::PreMeasured(plus), flip, NullPolicy::FlagForbidden)?;
            let bob = if plus { '+' } else { '-' };
            println!("Bob saw {bob}, flip {flip}: null = {}", out.null);
        }
    }
    let report = analyze_consistency(&ralph_scenario())?;
    println!("priority frame: {}", report.priority_frame.as_deref().unwrap_or("none"));
    Ok(())
}
