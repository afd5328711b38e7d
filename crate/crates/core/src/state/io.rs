//! Text format for states.
//!
//! ```text
//! qubits 1
//! pure
//! 0.7071067811865476 0
//! 0.7071067811865476 0
//! ```
//!
//! or `density` followed by `2^N` rows of `2^N` `re+imi` entries.

use super::{DensityState, PureState, State};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::numfmt::{format_complex, parse_complex};

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

pub fn parse_state(text: &str) -> Result<State> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| err(1, 1, "empty state file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("qubits") {
        return Err(err(ln, 1, "expected `qubits N`"));
    }
    let n: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(ln, 8, "expected qubit count"))?;
    crate::linalg::check_cap(n)?;
    let dim = 1usize << n;

    let (ln, kind) = lines.next().ok_or_else(|| err(ln + 1, 1, "expected `pure` or `density`"))?;
    match kind {
        "pure" => {
            let mut amps = Vec::with_capacity(dim);
            for _ in 0..dim {
                let (ln, row) = lines.next().ok_or_else(|| err(ln, 1, "missing amplitude line"))?;
                let parts: Vec<&str> = row.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(err(ln, 1, "expected `re im`"));
                }
                let re: f64 = parts[0].parse().map_err(|_| err(ln, 1, "bad real part"))?;
                let im: f64 = parts[1].parse().map_err(|_| err(ln, 1, "bad imaginary part"))?;
                amps.push(c(re, im));
            }
            trailing(lines)?;
            Ok(State::Pure(PureState::new(CVector::from_vec(amps))?))
        }
        "density" => {
            let mut m = CMatrix::zeros(dim, dim);
            for r in 0..dim {
                let (ln, row) = lines.next().ok_or_else(|| err(ln, 1, "missing matrix row"))?;
                let entries: Vec<&str> = row.split_whitespace().collect();
                if entries.len() != dim {
                    return Err(err(ln, 1, format!("expected {dim} entries, found {}", entries.len())));
                }
                for (col, e) in entries.iter().enumerate() {
                    m[(r, col)] =
                        parse_complex(e).ok_or_else(|| err(ln, col + 1, format!("bad complex literal `{e}`")))?;
                }
            }
            trailing(lines)?;
            Ok(State::Density(DensityState::new(m)?))
        }
        other => Err(err(ln, 1, format!("unknown state kind `{other}`"))),
    }
}

fn trailing<'a>(mut lines: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    match lines.next() {
        Some((ln, _)) => Err(err(ln, 1, "unexpected trailing content")),
        None => Ok(()),
    }
}

pub fn format_state(state: &State) -> String {
    let mut out = format!("qubits {}\n", state.qubits());
    match state {
        State::Pure(p) => {
            out.push_str("pure\n");
            for a in p.amplitudes().iter() {
                out.push_str(&format!("{} {}\n", a.re + 0.0, a.im + 0.0));
            }
        }
        State::Density(d) => {
            out.push_str("density\n");
            let m = d.matrix();
            for r in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|col| format_complex(m[(r, col)])).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}
