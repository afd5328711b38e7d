use super::{Circuit, Gate, GateKind, Polarity, Step};
use crate::numfmt::format_complex;

fn gate_text(g: &Gate) -> String {
    let wires: Vec<String> = g.targets.iter().map(|t| format!("q{t}")).collect();
    match &g.kind {
        GateKind::Custom { name, matrix } => {
            let mut s = format!("unitary \"{name}\" {}", matrix.nrows());
            for r in 0..matrix.nrows() {
                for col in 0..matrix.ncols() {
                    s.push(' ');
                    s.push_str(&format_complex(matrix[(r, col)]));
                }
                s.push_str(" ;");
            }
            format!("{s} {}", wires.join(" "))
        }
        kind => format!("{} {}", kind.name(), wires.join(" ")),
    }
}

/// Canonical DSL text; `parse_circuit(print_circuit(c)) == c`.
pub fn print_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {} ctc {}\n", c.cr_wires, c.ctc_wires);
    for (w, b) in &c.inits {
        out.push_str(&format!("init q{w} {b}\n"));
    }
    for step in &c.steps {
        match step {
            Step::Gate(g) => out.push_str(&gate_text(g)),
            Step::Controlled(cg) => {
                out.push_str("ctrl");
                for (w, p) in &cg.conditions {
                    let v = if *p == Polarity::OnOne { 1 } else { 0 };
                    out.push_str(&format!(" q{w}={v}"));
                }
                out.push_str(" apply ");
                out.push_str(&gate_text(&cg.body));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{bhw_circuit, parse_circuit};
    use super::*;

    #[test]
    fn minimal_round_trip() {
        let c = parse_circuit("qubits 2 ctc 0\nh q0\ncnot q0 q1").unwrap();
        assert_eq!(parse_circuit(&print_circuit(&c)).unwrap(), c);
    }

    #[test]
    fn bhw_round_trip() {
        let c = bhw_circuit();
        assert_eq!(parse_circuit(&print_circuit(&c)).unwrap(), c);
    }
}
