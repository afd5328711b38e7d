//! Line-oriented circuit DSL.
//!
//! ```text
//! qubits 2 ctc 2          # CR wires, then CTC wires
//! init q1 0
//! swap q0 q2
//! ctrl q0=1 q1=0 apply unitary "U10" 4 r0 ; r1 ; r2 ; r3 ; q2 q3
//! ```

use super::{step_problems, Circuit, ControlledGate, Gate, GateKind, Polarity, Step};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numfmt::parse_complex;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Semi,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn perr(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column: col, message: message.into() }
}

fn lex_line(line_no: usize, line: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch == '#' {
            break;
        } else if ch.is_whitespace() {
            i += 1;
        } else if ch == ';' {
            toks.push(Token { tok: Tok::Semi, line: line_no, col });
            i += 1;
        } else if ch == '"' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != '"' {
                j += 1;
            }
            if j >= chars.len() {
                return Err(perr(line_no, col, "unterminated string"));
            }
            toks.push(Token { tok: Tok::Str(chars[start..j].iter().collect()), line: line_no, col });
            i = j + 1;
        } else if ch.is_ascii_alphanumeric() || matches!(ch, '.' | '+' | '-' | '=' | '_') {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '.' | '+' | '-' | '=' | '_'))
            {
                i += 1;
            }
            toks.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line: line_no, col });
        } else {
            return Err(perr(line_no, col, format!("unexpected character `{ch}`")));
        }
    }
    Ok(toks)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or((self.line, self.end_col))
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, usize)> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Word(w), col, .. }) => Ok((w.as_str(), *col)),
            _ => Err(perr(line, col, format!("expected {what}"))),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize> {
        let (w, col) = self.word(what)?;
        w.parse().map_err(|_| perr(self.line, col, format!("expected {what}, found `{w}`")))
    }

    fn done(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(perr(t.line, t.col, "unexpected trailing tokens")),
        }
    }
}

fn parse_wire(w: &str, line: usize, col: usize, wires: usize) -> Result<usize> {
    let idx = w
        .strip_prefix('q')
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| perr(line, col, format!("expected wire `qN`, found `{w}`")))?;
    if idx >= wires {
        return Err(perr(line, col, format!("[out-of-range-wire] q{idx} but only {wires} wires declared")));
    }
    Ok(idx)
}

fn parse_gate(cur: &mut Cursor, wires: usize) -> Result<Gate> {
    let (name, col) = cur.word("gate name")?;
    let line = cur.line;
    let kind = if name == "unitary" {
        let (nl, nc) = cur.here();
        let label = match cur.next() {
            Some(Token { tok: Tok::Str(s), .. }) => s.clone(),
            _ => return Err(perr(nl, nc, "expected quoted unitary name")),
        };
        let dim = cur.int("matrix dimension")?;
        if dim == 0 || !dim.is_power_of_two() || dim > (1 << wires.max(1)) {
            return Err(perr(line, nc, format!("[bad-matrix-shape] dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for col in 0..dim {
                let (w, wc) = cur.word("complex literal")?;
                m[(r, col)] = parse_complex(w).ok_or_else(|| perr(line, wc, format!("bad complex literal `{w}`")))?;
            }
            let (sl, sc) = cur.here();
            match cur.next() {
                Some(Token { tok: Tok::Semi, .. }) => {}
                _ => return Err(perr(sl, sc, format!("expected `;` after row {r}"))),
            }
        }
        GateKind::Custom { name: label, matrix: m }
    } else {
        GateKind::from_name(name).ok_or_else(|| perr(line, col, format!("unknown gate `{name}`")))?
    };
    let mut targets = Vec::new();
    while let Some(Token { tok: Tok::Word(w), col, .. }) = cur.peek() {
        targets.push(parse_wire(w, line, *col, wires)?);
        cur.pos += 1;
    }
    if targets.is_empty() {
        let (l, c) = cur.here();
        return Err(perr(l, c, "expected target wires"));
    }
    Ok(Gate { kind, targets })
}

/// Parses circuit DSL text. Every failure carries a line and column.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = lex_line(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, line, end_col: raw.len() + 1 };
        let (kw, kw_col) = cur.word("statement")?;

        let Some(c) = circuit.as_mut() else {
            if kw != "qubits" {
                return Err(perr(line, kw_col, "expected header `qubits N ctc M`"));
            }
            let cr = cur.int("CR wire count")?;
            let (ctc_kw, cc) = cur.word("`ctc`")?;
            if ctc_kw != "ctc" {
                return Err(perr(line, cc, "expected `ctc`"));
            }
            let ctc = cur.int("CTC wire count")?;
            cur.done()?;
            if cr + ctc == 0 {
                return Err(perr(line, kw_col, "[no-wires] circuit declares no wires"));
            }
            crate::linalg::check_cap(cr + ctc).map_err(|e| perr(line, kw_col, e.to_string()))?;
            circuit = Some(Circuit::new(cr, ctc));
            continue;
        };
        let wires = c.total_wires();
        match kw {
            "qubits" => return Err(perr(line, kw_col, "duplicate header")),
            "init" => {
                let (w, wc) = cur.word("wire")?;
                let wire = parse_wire(w, line, wc, wires)?;
                let (b, bc) = cur.word("`0` or `1`")?;
                let bit = match b {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(perr(line, bc, format!("init value must be 0 or 1, found `{b}`"))),
                };
                cur.done()?;
                if wire >= c.cr_wires {
                    return Err(perr(line, wc, "[init-on-ctc-wire] init applies to CR wires only"));
                }
                if c.inits.iter().any(|(w, _)| *w == wire) {
                    return Err(perr(line, wc, format!("[duplicate-init] q{wire} initialized twice")));
                }
                c.inits.push((wire, bit));
            }
            "ctrl" => {
                let mut conditions = Vec::new();
                loop {
                    let (w, wc) = cur.word("`qN=0|1` or `apply`")?;
                    if w == "apply" {
                        break;
                    }
                    let (wire_txt, val) =
                        w.split_once('=').ok_or_else(|| perr(line, wc, format!("expected `qN=0|1`, found `{w}`")))?;
                    let wire = parse_wire(wire_txt, line, wc, wires)?;
                    let pol = match val {
                        "1" => Polarity::OnOne,
                        "0" => Polarity::OnZero,
                        _ => return Err(perr(line, wc, format!("control value must be 0 or 1, found `{val}`"))),
                    };
                    if conditions.iter().any(|(cw, _)| *cw == wire) {
                        return Err(perr(line, wc, format!("[duplicate-control] two controls on q{wire}")));
                    }
                    conditions.push((wire, pol));
                }
                if conditions.is_empty() {
                    return Err(perr(line, kw_col, "[empty-control] ctrl without conditions"));
                }
                let body = parse_gate(&mut cur, wires)?;
                cur.done()?;
                let step = Step::Controlled(ControlledGate { conditions, body });
                push_checked(c, step, line, kw_col)?;
            }
            _ => {
                cur.pos = 0;
                let g = parse_gate(&mut cur, wires)?;
                cur.done()?;
                push_checked(c, Step::Gate(g), line, kw_col)?;
            }
        }
    }
    circuit.ok_or_else(|| perr(1, 1, "missing header `qubits N ctc M`"))
}

fn push_checked(c: &mut Circuit, step: Step, line: usize, col: usize) -> Result<()> {
    if let Some((code, msg)) = step_problems(&step, c.total_wires()).into_iter().next() {
        return Err(perr(line, col, format!("[{code}] {msg}")));
    }
    c.steps.push(step);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let c = parse_circuit("qubits 2 ctc 0\nh q0\ncnot q0 q1").unwrap();
        assert_eq!(c.cr_wires, 2);
        assert_eq!(c.ctc_wires, 0);
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.steps[0], Step::Gate(Gate::new(GateKind::H, vec![0])));
        assert_eq!(c.steps[1], Step::Gate(Gate::new(GateKind::Cnot, vec![0, 1])));
    }

    fn err_at(text: &str) -> (usize, usize, String) {
        match parse_circuit(text).unwrap_err() {
            Error::Parse { line, column, message } => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_target_wire() {
        let (line, col, msg) = err_at("qubits 2 ctc 0\ncnot q0 q0");
        assert_eq!((line, col), (2, 1));
        assert!(msg.contains("duplicate wire"), "{msg}");
    }

    #[test]
    fn located_diagnostics() {
        let (l, c, m) = err_at("qubits 2 ctc 0\nfoo q0");
        assert_eq!((l, c), (2, 1));
        assert!(m.contains("unknown gate"));

        let (l, c, m) = err_at("qubits 2 ctc 2\nx q9");
        assert_eq!((l, c), (2, 3));
        assert!(m.contains("out-of-range-wire"));

        let (l, _, m) = err_at("qubits 2 ctc 0\n\nswap q0");
        assert_eq!(l, 3);
        assert!(m.contains("arity-mismatch"));

        let (l, c, m) = err_at("qubits 3 ctc 0\nctrl q0=1 q0=0 apply x q2");
        assert_eq!((l, c), (2, 11));
        assert!(m.contains("duplicate-control"));

        let (l, c, _) = err_at("qubits 1 ctc 0\nx q0 $");
        assert_eq!((l, c), (2, 6));

        let (_, _, m) = err_at("h q0");
        assert!(m.contains("header"));
    }

    #[test]
    fn control_target_overlap_is_rejected() {
        let (_, _, m) = err_at("qubits 2 ctc 0\nctrl q0=1 apply x q0");
        assert!(m.contains("control-target-overlap"));
    }

    #[test]
    fn custom_unitary_literal() {
        let c = parse_circuit("qubits 1 ctc 0\nunitary \"flip\" 2 0+0i 1+0i ; 1+0i 0+0i ; q0").unwrap();
        match &c.steps[0] {
            Step::Gate(g) => assert_eq!(g.kind.matrix(), GateKind::X.matrix()),
            _ => panic!(),
        }
        let (_, _, m) = err_at("qubits 1 ctc 0\nunitary \"bad\" 2 1+0i 1+0i ; 0+0i 1+0i ; q0");
        assert!(m.contains("non-unitary"));
    }
}
