//! Quantum states: pure vectors, density matrices and ensembles.
//!
//! States are immutable values. Every operation returns a new state.

pub(crate) mod functional;
mod io;
mod measure;

pub use functional::{trace_distance, von_neumann_entropy};
pub use io::{format_state, parse_state};
pub use measure::{measure_projective, Basis, MeasurementRecord, Outcome};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};

/// Equality tolerance used for state invariants.
pub const EQ_TOL: f64 = 1e-10;
/// Slack allowed below zero on density-matrix eigenvalues.
pub const PSD_SLACK: f64 = 1e-8;
/// Projection weights below this are treated as exactly zero.
pub const NULL_WEIGHT: f64 = 1e-12;

/// Normalized state vector on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let qubits = linalg::qubits_for_dim(amplitudes.len())
            .ok_or_else(|| Error::InvalidState(format!("length {} is not a power of two", amplitudes.len())))?;
        linalg::check_cap(qubits)?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > EQ_TOL {
            return Err(Error::InvalidState(format!("squared norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes, qubits })
    }

    /// Normalizes the vector first. Fails on a zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < NULL_WEIGHT {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        let qubits = linalg::qubits_for_dim(amplitudes.len()).expect("power-of-two length");
        Self { amplitudes, qubits }
    }

    /// Computational basis state `|b0 b1 ...>`.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        let n = bits.len();
        linalg::check_cap(n)?;
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidState(format!("bit value {b}")));
            }
            index = (index << 1) | b as usize;
        }
        let mut v = CVector::zeros(1 << n);
        v[index] = ONE;
        Ok(Self::from_vector_unchecked(v))
    }

    pub fn zero() -> Self {
        Self::single(ONE, ZERO)
    }

    pub fn one() -> Self {
        Self::single(ZERO, ONE)
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::single(c(h, 0.0), c(h, 0.0))
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::single(c(h, 0.0), c(-h, 0.0))
    }

    fn single(a: Complex64, b: Complex64) -> Self {
        Self::from_vector_unchecked(CVector::from_vec(vec![a, b]))
    }

    /// One of the four Bell states on two qubits.
    pub fn bell(which: Bell) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match which {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        };
        Self::from_vector_unchecked(CVector::from_iterator(4, amps.iter().map(|&a| c(a, 0.0))))
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn to_density(&self) -> DensityState {
        DensityState::from_matrix_unchecked(linalg::outer(&self.amplitudes))
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        linalg::check_cap(self.qubits + other.qubits)?;
        Ok(Self::from_vector_unchecked(linalg::kron_vec(&self.amplitudes, &other.amplitudes)))
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<PureState> {
        require_unitary(u)?;
        let v = linalg::apply_to_vector(&self.amplitudes, u, targets, self.qubits)?;
        Ok(Self::from_vector_unchecked(v))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Labels for the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bell {
    /// `(|00> + |11>)/sqrt2`
    PhiPlus,
    PhiMinus,
    /// `(|01> + |10>)/sqrt2`
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi+",
            Bell::PhiMinus => "phi-",
            Bell::PsiPlus => "psi+",
            Bell::PsiMinus => "psi-",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.label() == s)
    }

    pub fn projector(self) -> CMatrix {
        linalg::outer(PureState::bell(self).amplitudes())
    }
}

/// Density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
    qubits: usize,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let qubits = linalg::qubits_for_dim(matrix.nrows())
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", matrix.nrows())))?;
        linalg::check_cap(qubits)?;
        let herm = linalg::hermiticity_deviation(&matrix);
        if herm > EQ_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > EQ_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min < -PSD_SLACK {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix, qubits })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let qubits = linalg::qubits_for_dim(matrix.nrows()).expect("power-of-two dimension");
        Self { matrix: linalg::hermitize(&matrix), qubits }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        linalg::check_cap(qubits)?;
        let d = 1usize << qubits;
        Ok(Self::from_matrix_unchecked(linalg::identity(d).unscale(d as f64)))
    }

    pub fn basis(bits: &[u8]) -> Result<Self> {
        Ok(PureState::basis(bits)?.to_density())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Probability of reading `bits` on `qubits` in the computational basis.
    pub fn probability_of(&self, qubits: &[usize], bits: &[u8]) -> Result<f64> {
        if qubits.len() != bits.len() {
            return Err(Error::Qubits("one bit per qubit required".into()));
        }
        let masks = linalg::target_masks(qubits, self.qubits)?;
        let mut p = 0.0;
        for i in 0..self.dim() {
            if masks.iter().zip(bits).all(|(&m, &b)| ((i & m) != 0) == (b == 1)) {
                p += self.matrix[(i, i)].re;
            }
        }
        Ok(p)
    }

    pub fn tensor(&self, other: &DensityState) -> Result<DensityState> {
        linalg::check_cap(self.qubits + other.qubits)?;
        Ok(Self::from_matrix_unchecked(linalg::kron(&self.matrix, &other.matrix)))
    }

    /// Reduced state over `keep`, a nonempty proper subset of the qubits.
    /// The kept qubits appear in the order listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityState> {
        if keep.is_empty() {
            return Err(Error::Qubits("keep-set is empty".into()));
        }
        if keep.len() >= self.qubits {
            return Err(Error::Qubits("keep-set must be a proper subset".into()));
        }
        let m = linalg::partial_trace(&self.matrix, keep, self.qubits)?;
        Ok(Self::from_matrix_unchecked(m))
    }

    /// Like [`partial_trace`](Self::partial_trace) but permits keeping every
    /// qubit (then it only reorders) or none (then the result is `[[1]]`).
    pub(crate) fn reduce_to(&self, keep: &[usize]) -> Result<DensityState> {
        let m = linalg::partial_trace(&self.matrix, keep, self.qubits)?;
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityState> {
        require_unitary(u)?;
        let m = linalg::conjugate(&self.matrix, u, targets, self.qubits)?;
        Ok(Self::from_matrix_unchecked(m))
    }

    /// Returns `(P rho P / w, w)` with `w = tr(P rho)`, or `None` when `w` is null.
    pub(crate) fn project_raw(&self, projector: &CMatrix, targets: &[usize]) -> Result<(Option<DensityState>, f64)> {
        let left = linalg::apply_left(&self.matrix, projector, targets, self.qubits)?;
        let both = linalg::apply_left(&left.adjoint(), projector, targets, self.qubits)?.adjoint();
        let w = linalg::trace(&both).re.max(0.0);
        if w < NULL_WEIGHT {
            return Ok((None, w));
        }
        Ok((Some(Self::from_matrix_unchecked(both.unscale(w))), w))
    }
}

impl From<&PureState> for DensityState {
    fn from(p: &PureState) -> Self {
        p.to_density()
    }
}

/// Either a pure or a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Density(DensityState),
}

impl State {
    pub fn qubits(&self) -> usize {
        match self {
            State::Pure(p) => p.qubits(),
            State::Density(d) => d.qubits(),
        }
    }

    pub fn to_density(&self) -> DensityState {
        match self {
            State::Pure(p) => p.to_density(),
            State::Density(d) => d.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Density(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityState> for State {
    fn from(d: DensityState) -> Self {
        State::Density(d)
    }
}

/// Kronecker product with `a` as the left (lower-index) factor. Mixing kinds
/// yields a density state.
pub fn tensor_product(a: &State, b: &State) -> Result<State> {
    match (a, b) {
        (State::Pure(x), State::Pure(y)) => Ok(State::Pure(x.tensor(y)?)),
        _ => Ok(State::Density(a.to_density().tensor(&b.to_density())?)),
    }
}

pub fn partial_trace(rho: &DensityState, keep: &[usize]) -> Result<DensityState> {
    rho.partial_trace(keep)
}

pub fn apply_unitary(state: &State, u: &CMatrix, targets: &[usize]) -> Result<State> {
    Ok(match state {
        State::Pure(p) => State::Pure(p.apply_unitary(u, targets)?),
        State::Density(d) => State::Density(d.apply_unitary(u, targets)?),
    })
}

/// Result of projecting onto a subspace and renormalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Renormalized state; `None` when the projection is null.
    pub state: Option<State>,
    /// Pre-normalization weight `<P>`.
    pub weight: f64,
}

impl Projection {
    pub fn is_null(&self) -> bool {
        self.state.is_none()
    }
}

pub fn project_and_renormalize(state: &State, projector: &CMatrix, targets: &[usize]) -> Result<Projection> {
    require_projector(projector)?;
    match state {
        State::Pure(p) => {
            let v = linalg::apply_to_vector(p.amplitudes(), projector, targets, p.qubits())?;
            let w = v.norm_squared();
            if w < NULL_WEIGHT {
                return Ok(Projection { state: None, weight: w });
            }
            let v = v.unscale(w.sqrt());
            Ok(Projection { state: Some(State::Pure(PureState::from_vector_unchecked(v))), weight: w })
        }
        State::Density(d) => {
            let (s, w) = d.project_raw(projector, targets)?;
            Ok(Projection { state: s.map(State::Density), weight: w })
        }
    }
}

pub(crate) fn require_unitary(u: &CMatrix) -> Result<()> {
    let deviation = linalg::unitarity_deviation(u);
    if deviation > EQ_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

fn require_projector(p: &CMatrix) -> Result<()> {
    if !p.is_square() {
        return Err(Error::InvalidProjector("not square".into()));
    }
    let herm = linalg::hermiticity_deviation(p);
    let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if herm > EQ_TOL || idem > EQ_TOL {
        return Err(Error::InvalidProjector(format!(
            "hermiticity deviation {herm:.3e}, idempotence deviation {idem:.3e}"
        )));
    }
    Ok(())
}

/// A probability-weighted collection of states: a proper mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, State)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, State)>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidEnsemble("ensemble has no members".into()))?;
        let n = first.1.qubits();
        let mut total = 0.0;
        for (p, s) in &members {
            if !(-EQ_TOL..=1.0 + EQ_TOL).contains(p) {
                return Err(Error::InvalidEnsemble(format!("probability {p} outside [0,1]")));
            }
            if s.qubits() != n {
                return Err(Error::InvalidEnsemble("members differ in qubit count".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > EQ_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn singleton(state: State) -> Self {
        Self { members: vec![(1.0, state)] }
    }

    pub fn members(&self) -> &[(f64, State)] {
        &self.members
    }

    pub fn qubits(&self) -> usize {
        self.members[0].1.qubits()
    }

    /// The averaged density matrix: the improper-mixture view of the ensemble.
    pub fn average(&self) -> DensityState {
        let d = 1usize << self.qubits();
        let mut m = CMatrix::zeros(d, d);
        for (p, s) in &self.members {
            m += s.to_density().matrix().scale(*p);
        }
        DensityState::from_matrix_unchecked(m)
    }

    /// Tensors every member with a fixed state on the right.
    pub fn tensor_right(&self, other: &State) -> Result<Ensemble> {
        let members =
            self.members.iter().map(|(p, s)| Ok((*p, tensor_product(s, other)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amps(v: &PureState) -> Vec<Complex64> {
        v.amplitudes().iter().copied().collect()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = PureState::zero().tensor(&PureState::one()).unwrap();
        assert_eq!(amps(&s), vec![ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn tensor_of_mixed_qubits() {
        let half = DensityState::maximally_mixed(1).unwrap();
        let quarter = half.tensor(&half).unwrap();
        assert!((quarter.matrix() - linalg::identity(4).unscale(4.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_plus_zero() {
        let s = PureState::plus().tensor(&PureState::zero()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [h, 0.0, h, 0.0];
        for (a, e) in amps(&s).iter().zip(expect) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_respects_cap() {
        let big = PureState::basis(&[0; 7]).unwrap();
        assert!(matches!(big.tensor(&big), Err(Error::QubitCap { .. })));
    }

    #[test]
    fn partial_trace_examples() {
        let zz = DensityState::basis(&[0, 0]).unwrap();
        let a = zz.partial_trace(&[0]).unwrap();
        assert!((a.matrix() - DensityState::basis(&[0]).unwrap().matrix()).norm() < 1e-15);

        let phi = PureState::bell(Bell::PhiPlus).to_density();
        let b = phi.partial_trace(&[1]).unwrap();
        assert!((b.matrix() - linalg::identity(2).unscale(2.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let zz = DensityState::basis(&[0, 0]).unwrap();
        assert!(zz.partial_trace(&[]).is_err());
        assert!(zz.partial_trace(&[0, 1]).is_err());
    }

    #[test]
    fn z_turns_plus_into_minus() {
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]));
        let out = PureState::plus().apply_unitary(&z, &[0]).unwrap();
        assert!((out.fidelity(&PureState::minus()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_unitary_rejected_with_deviation() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        match PureState::zero().apply_unitary(&m, &[0]) {
            Err(Error::NotUnitary { deviation }) => assert!(deviation > 0.5),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn projecting_bell_onto_itself() {
        let phi: State = PureState::bell(Bell::PhiPlus).into();
        let pr = project_and_renormalize(&phi, &Bell::PhiPlus.projector(), &[0, 1]).unwrap();
        assert!((pr.weight - 1.0).abs() < 1e-14);
        assert_eq!(pr.state.unwrap(), phi);
    }

    #[test]
    fn orthogonal_projection_is_null() {
        let psi: State = PureState::bell(Bell::PsiPlus).into();
        let pr = project_and_renormalize(&psi, &Bell::PhiPlus.projector(), &[0, 1]).unwrap();
        assert!(pr.is_null());
        assert_eq!(pr.weight, 0.0);
    }

    #[test]
    fn non_projector_rejected() {
        let m = linalg::identity(2).scale(2.0);
        assert!(project_and_renormalize(&PureState::zero().into(), &m, &[0]).is_err());
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityState::new(bad).is_err());
        let nonherm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), ZERO, c(0.5, 0.0)]);
        assert!(DensityState::new(nonherm).is_err());
        assert!(DensityState::new(linalg::identity(3).unscale(3.0)).is_err());
    }

    #[test]
    fn ensemble_average_is_improper_mixture() {
        let e = Ensemble::new(vec![(0.5, PureState::zero().into()), (0.5, PureState::one().into())]).unwrap();
        let avg = e.average();
        assert!((avg.matrix() - linalg::identity(2).unscale(2.0)).norm() < 1e-15);
        assert!(Ensemble::new(vec![(0.3, PureState::zero().into())]).is_err());
    }
}
