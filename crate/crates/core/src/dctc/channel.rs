use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{require_unitary, DensityState};

/// The map `X -> Tr_CR[U (rho_cr ⊗ X) U†]` on the CTC register, in Kraus form.
///
/// Wire order follows the circuit convention: CR qubits first, CTC qubits last.
#[derive(Debug, Clone)]
pub struct CtcChannel {
    kraus: Vec<CMatrix>,
    ctc_dim: usize,
}

impl CtcChannel {
    pub fn new(rho_cr: &DensityState, u: &CMatrix) -> Result<Self> {
        require_unitary(u)?;
        let cr_dim = rho_cr.dim();
        if !u.nrows().is_multiple_of(cr_dim) {
            return Err(Error::Dimension(format!(
                "unitary of size {} does not factor over a CR register of dimension {cr_dim}",
                u.nrows()
            )));
        }
        let ctc_dim = u.nrows() / cr_dim;
        if !ctc_dim.is_power_of_two() {
            return Err(Error::Dimension(format!("CTC dimension {ctc_dim} is not a power of two")));
        }
        // rho_cr = sum_a l_a |v_a><v_a|;  K_ab = sqrt(l_a) (<b| ⊗ I) U (|v_a> ⊗ I).
        let (values, vectors) = linalg::hermitian_eigen(rho_cr.matrix());
        let mut kraus = Vec::new();
        for (a, &l) in values.iter().enumerate() {
            if l <= 1e-15 {
                continue;
            }
            let va = vectors.column(a);
            // U (|v_a> ⊗ I): columns indexed by the CTC input.
            let mut in_map = CMatrix::zeros(u.nrows(), ctc_dim);
            for j in 0..ctc_dim {
                for (i, amp) in va.iter().enumerate() {
                    if amp.norm_sqr() == 0.0 {
                        continue;
                    }
                    let col = u.column(i * ctc_dim + j);
                    for r in 0..u.nrows() {
                        in_map[(r, j)] += col[r] * amp;
                    }
                }
            }
            let scale = l.sqrt();
            for b in 0..cr_dim {
                let k = in_map.rows(b * ctc_dim, ctc_dim).scale(scale).into_owned();
                if k.norm() > 1e-15 {
                    kraus.push(k);
                }
            }
        }
        Ok(Self { kraus, ctc_dim })
    }

    pub fn ctc_dim(&self) -> usize {
        self.ctc_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.ctc_dim, self.ctc_dim);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Matrix of the map on column-major vectorized operators:
    /// `vec(K X K†) = (conj(K) ⊗ K) vec(X)`.
    pub fn superoperator(&self) -> CMatrix {
        let d2 = self.ctc_dim * self.ctc_dim;
        let mut s = CMatrix::zeros(d2, d2);
        for k in &self.kraus {
            s += linalg::kron(&k.conjugate(), k);
        }
        s
    }
}

/// One application of the Deutsch consistency map:
/// `Tr_CR[U (rho_cr ⊗ rho_ctc) U†]`.
pub fn ctc_map(rho_ctc: &DensityState, rho_cr: &DensityState, u: &CMatrix) -> Result<DensityState> {
    require_unitary(u)?;
    if rho_ctc.dim() * rho_cr.dim() != u.nrows() {
        return Err(Error::Dimension(format!(
            "CR dimension {} times CTC dimension {} does not match unitary size {}",
            rho_cr.dim(),
            rho_ctc.dim(),
            u.nrows()
        )));
    }
    let joint = rho_cr.tensor(rho_ctc)?;
    let n = joint.qubits();
    let evolved = linalg::conjugate(joint.matrix(), u, &(0..n).collect::<Vec<_>>(), n)?;
    let keep: Vec<usize> = (rho_cr.qubits()..n).collect();
    let m = linalg::partial_trace(&evolved, &keep, n)?;
    Ok(DensityState::from_matrix_unchecked(m))
}
