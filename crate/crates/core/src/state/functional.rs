use super::DensityState;
use crate::error::{Error, Result};
use crate::linalg;

/// `-sum(l ln l)` over the spectrum, in nats, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityState) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum::<f64>().max(0.0)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityState, b: &DensityState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(matrix_trace_distance(a.matrix(), b.matrix()))
}

pub(crate) fn matrix_trace_distance(a: &linalg::CMatrix, b: &linalg::CMatrix) -> f64 {
    let diff = a - b;
    0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!(von_neumann_entropy(&DensityState::basis(&[0]).unwrap()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityState::maximally_mixed(1).unwrap()) - ln2).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityState::maximally_mixed(2).unwrap()) - 2.0 * ln2).abs() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let zero = DensityState::basis(&[0]).unwrap();
        let one = DensityState::basis(&[1]).unwrap();
        let mixed = DensityState::maximally_mixed(1).unwrap();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        // diag(1/2, -1/2): half of |1/2| + |-1/2|.
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!(trace_distance(&zero, &DensityState::maximally_mixed(2).unwrap()).is_err());
    }
}
