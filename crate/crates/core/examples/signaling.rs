//! Alice's basis choice shows up in Bob's BHW register only in the frame
//! where she measures first; the consistency analysis picks that frame.

use ctcsim::scenario::{analyze_consistency, bhw_signaling_scenario, run_bhw_signaling, SignalingFrame};
use ctcsim::state::Basis;

fn main() -> ctcsim::Result<()> {
    for frame in [SignalingFrame::AliceFirst, SignalingFrame::BobFirst] {
        for basis in [Basis::Computational, Basis::Diagonal] {
            let table = run_bhw_signaling(basis, frame)?;
            println!(
                "{:<12} {:<14} P(a=1) = {:.3}",
                frame.label(),
                basis.name(),
                table.probability(&[("a", "1")]).max(0.0)
            );
        }
    }
    let report = analyze_consistency(&bhw_signaling_scenario())?;
    println!("excluded: {:?}", report.excluded);
    println!("priority frame: {}", report.priority_frame.as_deref().unwrap_or("none"));
    Ok(())
}
