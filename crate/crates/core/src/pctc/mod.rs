//! Post-selected (projective) semantics for CTC interactions.
//!
//! Each CTC wire is simulated by a `|phi+>` pair. The circuit unitary acts on
//! the CR register and the first halves; the pairs are then projected back
//! onto `|phi+>` and the CR register is renormalized. Equivalently the CR
//! register evolves by `C = Tr_CTC[U]` followed by renormalization, which is
//! checked rather than assumed in the test suite.

mod montecarlo;

pub use montecarlo::{montecarlo_teleport, TeleportTrialLog, BATCH_SIZE};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::state::{require_unitary, DensityState, PureState, State, NULL_WEIGHT};

/// What to do when the post-selection has zero weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NullPolicy {
    /// The interaction fails to occur: report an error.
    #[default]
    #[serde(rename = "error")]
    ErrorOnNull,
    /// Return a null-marked outcome; the event is forbidden.
    #[serde(rename = "flag")]
    FlagForbidden,
}

impl NullPolicy {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "error" | "error-on-null" => Some(NullPolicy::ErrorOnNull),
            "flag" | "flag-forbidden" => Some(NullPolicy::FlagForbidden),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NullPolicy::ErrorOnNull => "error",
            NullPolicy::FlagForbidden => "flag",
        }
    }
}

impl fmt::Display for NullPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSelectionOutcome {
    /// Renormalized CR state, absent when the projection is null.
    pub state: Option<State>,
    /// Pre-normalization probability of the post-selected outcome.
    pub weight: f64,
    pub null: bool,
    pub policy: NullPolicy,
}

/// `|Phi> = prod_i |phi+>_(first_i, second_i)` with qubits ordered
/// `first_0 .. first_{k-1}, second_0 .. second_{k-1}`.
pub(crate) fn pair_register(ctc_wires: usize) -> CVector {
    let d = 1usize << ctc_wires;
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(d * d);
    for x in 0..d {
        v[x * d + x] = amp;
    }
    v
}

fn check_dims(cr_qubits: usize, u: &CMatrix, ctc_wires: usize) -> Result<()> {
    require_unitary(u)?;
    let expect = 1usize << (cr_qubits + ctc_wires);
    if u.nrows() != expect {
        return Err(Error::Dimension(format!(
            "unitary of size {} does not act on {cr_qubits} CR + {ctc_wires} CTC wires",
            u.nrows()
        )));
    }
    linalg::check_cap(cr_qubits + 2 * ctc_wires)
}

/// `v` on CR ⊗ first ⊗ second after `U` acts on CR ⊗ first.
pub(crate) fn interacted_vector(psi: &PureState, u: &CMatrix, ctc_wires: usize) -> Result<CVector> {
    let n = psi.qubits() + 2 * ctc_wires;
    let v = linalg::kron_vec(psi.amplitudes(), &pair_register(ctc_wires));
    let targets: Vec<usize> = (0..psi.qubits() + ctc_wires).collect();
    linalg::apply_to_vector(&v, u, &targets, n)
}

/// `(I ⊗ <b|) v`, contracting the trailing register against `b`.
pub(crate) fn contract_tail(v: &CVector, b: &CVector) -> CVector {
    let tail = b.len();
    let head = v.len() / tail;
    CVector::from_fn(head, |i, _| (0..tail).map(|p| b[p].conj() * v[i * tail + p]).sum())
}

fn contract_tail_density(m: &CMatrix, b: &CVector) -> CMatrix {
    let tail = b.len();
    let head = m.nrows() / tail;
    CMatrix::from_fn(head, head, |i, j| {
        let mut acc = linalg::ZERO;
        for p in 0..tail {
            for q in 0..tail {
                acc += b[p].conj() * m[(i * tail + p, j * tail + q)] * b[q];
            }
        }
        acc
    })
}

/// Runs the P-CTC construction on a CR input.
pub fn evolve_postselected(
    cr_state: &State,
    u: &CMatrix,
    ctc_wires: usize,
    policy: NullPolicy,
) -> Result<PostSelectionOutcome> {
    check_dims(cr_state.qubits(), u, ctc_wires)?;
    let pairs = pair_register(ctc_wires);
    let (state, weight) = match cr_state {
        State::Pure(psi) => {
            let v = interacted_vector(psi, u, ctc_wires)?;
            let out = contract_tail(&v, &pairs);
            let w = out.norm_squared();
            let s = (w >= NULL_WEIGHT).then(|| State::Pure(PureState::from_vector_unchecked(out.unscale(w.sqrt()))));
            (s, w)
        }
        State::Density(rho) => {
            let pair_rho = linalg::outer(&pairs);
            let joint = linalg::kron(rho.matrix(), &pair_rho);
            let n = rho.qubits() + 2 * ctc_wires;
            let targets: Vec<usize> = (0..rho.qubits() + ctc_wires).collect();
            let evolved = linalg::conjugate(&joint, u, &targets, n)?;
            let out = contract_tail_density(&evolved, &pairs);
            let w = linalg::trace(&out).re.max(0.0);
            let s = (w >= NULL_WEIGHT).then(|| State::Density(DensityState::from_matrix_unchecked(out.unscale(w))));
            (s, w)
        }
    };
    let null = state.is_none();
    if null && policy == NullPolicy::ErrorOnNull {
        return Err(Error::NullProjection);
    }
    Ok(PostSelectionOutcome { state, weight, null, policy })
}

/// P-CTC interaction on the `wires` of a larger register.
///
/// Returns the renormalized register (or `None` when null) and the weight.
pub fn postselect_embedded(
    global: &DensityState,
    wires: &[usize],
    u: &CMatrix,
    ctc_wires: usize,
) -> Result<(Option<DensityState>, f64)> {
    check_dims(wires.len(), u, ctc_wires)?;
    let n = global.qubits();
    linalg::target_masks(wires, n)?;
    linalg::check_cap(n + 2 * ctc_wires)?;
    let pairs = pair_register(ctc_wires);
    let joint = linalg::kron(global.matrix(), &linalg::outer(&pairs));
    let targets: Vec<usize> = wires.iter().copied().chain(n..n + ctc_wires).collect();
    let evolved = linalg::conjugate(&joint, u, &targets, n + 2 * ctc_wires)?;
    let out = contract_tail_density(&evolved, &pairs);
    let w = linalg::trace(&out).re.max(0.0);
    if w < NULL_WEIGHT {
        return Ok((None, w));
    }
    Ok((Some(DensityState::from_matrix_unchecked(out.unscale(w))), w))
}

/// `C = Tr_CTC[U]`, an operator on the CR register (not normalized).
pub fn transcription_operator(u: &CMatrix, ctc_wires: usize) -> Result<CMatrix> {
    let n = linalg::qubits_for_dim(u.nrows())
        .filter(|_| u.is_square())
        .ok_or_else(|| Error::Dimension("operator dimension is not a power of two".into()))?;
    if ctc_wires > n {
        return Err(Error::Dimension(format!("{ctc_wires} CTC wires on a {n}-qubit operator")));
    }
    let keep: Vec<usize> = (0..n - ctc_wires).collect();
    linalg::partial_trace(u, &keep, n)
}
