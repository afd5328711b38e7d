//! Sending a message into its own causal past through two signaling hops.

use ctcsim::scenario::{run_relay, Mechanism, RelaySpec};

fn main() -> ctcsim::Result<()> {
    let message = [1, 0, 1, 1];
    for mechanism in [Mechanism::BasisChoice, Mechanism::PhaseFlip] {
        let result = run_relay(&RelaySpec::two_hop(mechanism, &message))?;
        println!(
            "{mechanism:?}: sent {:?}, decoded {:?}, arrives before it was sent: {}",
            result.message, result.decoded, result.causal_past
        );
        for r in &result.reports {
            println!("  {}: priority {}", r.scenario, r.priority_frame.as_deref().unwrap_or("none"));
        }
    }
    Ok(())
}
