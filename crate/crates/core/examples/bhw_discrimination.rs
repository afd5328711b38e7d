//! Distinguishing the four BB84 states with the D-CTC circuit, and what a
//! maximally mixed input does to it.

use ctcsim::scenario::{run_bhw, BhwInput};

fn main() -> ctcsim::Result<()> {
    for input in [BhwInput::Zero, BhwInput::One, BhwInput::Plus, BhwInput::Minus] {
        let run = run_bhw(&input)?;
        println!(
            "{input:?}: P(a=1) = {:.3}, P(b=1) = {:.3}, residual {:.1e}",
            run.a[1].max(0.0),
            run.b[1].max(0.0),
            run.fixed_points[0].residual
        );
    }
    let mixed = run_bhw(&BhwInput::MaximallyMixed)?;
    println!("I/2 input: P(a=1) = {:.3}", mixed.a[1]);
    println!("CTC fixed point spectrum: {:.3?}", mixed.fixed_points[0].rho_ctc.eigenvalues());
    Ok(())
}
