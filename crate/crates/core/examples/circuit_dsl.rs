//! Writing, validating and printing circuits in the text format.

use ctcsim::circuit::{bhw_circuit, parse_circuit, print_circuit, validate};

fn main() -> ctcsim::Result<()> {
    let text = "\
qubits 2 ctc 1   # two CR wires, one CTC wire
init q1 0
h q0
ctrl q0=0 apply x q1
cnot q1 q2
";
    let circuit = parse_circuit(text)?;
    println!("{} steps, {} diagnostics", circuit.steps.len(), validate(&circuit).len());
    print!("canonical form:\n{}", print_circuit(&circuit));

    for bad in ["qubits 1 ctc 1\nx q3\n", "qubits 2 ctc 0\ncnot q0 q0\n", "qubits 1 ctc 0\nfoo q0\n"] {
        if let Err(e) = parse_circuit(bad) {
            println!("rejected: {e}");
        }
    }
    let bhw = print_circuit(&bhw_circuit());
    println!("BHW circuit has {} lines", bhw.lines().count());
    Ok(())
}
