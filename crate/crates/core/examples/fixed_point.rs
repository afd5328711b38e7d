//! Solving the D-CTC consistency condition, including degenerate cases where
//! the maximum-entropy rule picks the solution.

use ctcsim::circuit::{assemble_unitary, parse_circuit};
use ctcsim::dctc::{averaged_iterate, solve_fixed_point, CtcChannel};
use ctcsim::state::{trace_distance, DensityState};

fn main() -> ctcsim::Result<()> {
    let programs = [
        ("grandfather", "qubits 1 ctc 1\nx q1\n"),
        ("identity", "qubits 1 ctc 2\n"),
        ("swap-in", "qubits 1 ctc 1\nh q0\nswap q0 q1\n"),
    ];
    let rho_cr = DensityState::basis(&[0])?;
    for (name, text) in programs {
        let u = assemble_unitary(&parse_circuit(text)?)?;
        let fp = solve_fixed_point(&rho_cr, &u)?;
        println!("{name}: entropy {:.4} nats, degenerate {}, residual {:.1e}", fp.entropy, fp.degenerate, fp.residual);
        if !fp.degenerate {
            let (avg, steps) = averaged_iterate(&CtcChannel::new(&rho_cr, &u)?, 100_000, 1e-14);
            let d = trace_distance(&DensityState::new(avg)?, &fp.rho_ctc)?;
            println!("  averaged iterate agrees to {d:.1e} after {steps} steps");
        }
    }
    Ok(())
}
