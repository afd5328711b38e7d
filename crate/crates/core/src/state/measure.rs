use std::fmt;

use serde::{Deserialize, Serialize};

use super::{project_and_renormalize, Bell, PureState, State, NULL_WEIGHT};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Computational,
    Diagonal,
    Bell,
}

impl Basis {
    pub fn arity(self) -> usize {
        match self {
            Basis::Computational | Basis::Diagonal => 1,
            Basis::Bell => 2,
        }
    }

    pub fn outcomes(self) -> &'static [Outcome] {
        match self {
            Basis::Computational => &[Outcome::Zero, Outcome::One],
            Basis::Diagonal => &[Outcome::Plus, Outcome::Minus],
            Basis::Bell => &[Outcome::PhiPlus, Outcome::PhiMinus, Outcome::PsiPlus, Outcome::PsiMinus],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Computational => "computational",
            Basis::Diagonal => "diagonal",
            Basis::Bell => "bell",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "computational" | "comp" | "z" => Some(Basis::Computational),
            "diagonal" | "diag" | "x" => Some(Basis::Diagonal),
            "bell" => Some(Basis::Bell),
            _ => None,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Zero => "0",
            Outcome::One => "1",
            Outcome::Plus => "+",
            Outcome::Minus => "-",
            Outcome::PhiPlus => "phi+",
            Outcome::PhiMinus => "phi-",
            Outcome::PsiPlus => "psi+",
            Outcome::PsiMinus => "psi-",
        }
    }

    /// Eigenvector of the measured observable for this outcome.
    pub fn eigenstate(self) -> PureState {
        match self {
            Outcome::Zero => PureState::zero(),
            Outcome::One => PureState::one(),
            Outcome::Plus => PureState::plus(),
            Outcome::Minus => PureState::minus(),
            Outcome::PhiPlus => PureState::bell(Bell::PhiPlus),
            Outcome::PhiMinus => PureState::bell(Bell::PhiMinus),
            Outcome::PsiPlus => PureState::bell(Bell::PsiPlus),
            Outcome::PsiMinus => PureState::bell(Bell::PsiMinus),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub basis: Basis,
    pub qubits: Vec<usize>,
    pub outcome: Outcome,
    pub probability: f64,
}

/// Full outcome decomposition of a projective measurement.
///
/// Outcomes with Born probability below the null threshold are omitted; each
/// returned post-state is the renormalized projection of the whole register.
pub fn measure_projective(state: &State, basis: Basis, qubits: &[usize]) -> Result<Vec<(MeasurementRecord, State)>> {
    if qubits.len() != basis.arity() {
        return Err(Error::Basis(format!("{basis} basis measures {} qubit(s), got {}", basis.arity(), qubits.len())));
    }
    linalg::target_masks(qubits, state.qubits())?;
    let mut out = Vec::new();
    for &outcome in basis.outcomes() {
        let projector = linalg::outer(outcome.eigenstate().amplitudes());
        let pr = project_and_renormalize(state, &projector, qubits)?;
        if let Some(post) = pr.state {
            if pr.weight >= NULL_WEIGHT {
                let record =
                    MeasurementRecord { basis, qubits: qubits.to_vec(), outcome, probability: pr.weight.min(1.0) };
                out.push((record, post));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_in_computational_basis() {
        let out = measure_projective(&PureState::plus().into(), Basis::Computational, &[0]).unwrap();
        assert_eq!(out.len(), 2);
        for (rec, _) in &out {
            assert!((rec.probability - 0.5).abs() < 1e-14);
        }
        assert_eq!(out[0].0.outcome, Outcome::Zero);
        assert_eq!(out[1].0.outcome, Outcome::One);
    }

    #[test]
    fn eigenstate_has_single_outcome() {
        let out = measure_projective(&PureState::zero().into(), Basis::Computational, &[0]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0.outcome, Outcome::Zero);
        assert!((out[0].0.probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_plus_in_diagonal_basis_correlates() {
        let psi: State = PureState::bell(Bell::PsiPlus).into();
        let out = measure_projective(&psi, Basis::Diagonal, &[0]).unwrap();
        assert_eq!(out.len(), 2);
        let pp = PureState::plus().tensor(&PureState::plus()).unwrap();
        let mm = PureState::minus().tensor(&PureState::minus()).unwrap();
        let (r0, s0) = &out[0];
        let (r1, s1) = &out[1];
        assert_eq!(r0.outcome, Outcome::Plus);
        assert_eq!(r1.outcome, Outcome::Minus);
        assert!((r0.probability - 0.5).abs() < 1e-14);
        assert!((s0.as_pure().unwrap().fidelity(&pp) - 1.0).abs() < 1e-14);
        assert!((s1.as_pure().unwrap().fidelity(&mm) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_basis_needs_two_qubits() {
        let err = measure_projective(&PureState::zero().into(), Basis::Bell, &[0]).unwrap_err();
        assert!(matches!(err, Error::Basis(_)));
    }
}
