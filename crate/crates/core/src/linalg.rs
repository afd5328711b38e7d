//! Dense complex kernels shared by the state and circuit layers.
//!
//! Qubit 0 is the leftmost tensor factor, so it maps to the most significant
//! bit of a basis index. Every kernel here follows that convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default cap on the total number of simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 12;

/// Environment variable that overrides [`DEFAULT_QUBIT_CAP`].
pub const QUBIT_CAP_ENV: &str = "CTCSIM_MAX_QUBITS";

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Active qubit cap, honoring `CTCSIM_MAX_QUBITS` when it parses.
pub fn qubit_cap() -> usize {
    std::env::var(QUBIT_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0 && n < 30)
        .unwrap_or(DEFAULT_QUBIT_CAP)
}

pub fn check_cap(qubits: usize) -> Result<()> {
    let cap = qubit_cap();
    if qubits > cap {
        return Err(Error::QubitCap { qubits, cap });
    }
    Ok(())
}

/// Number of qubits for a dimension that is an exact power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        None
    } else {
        Some(dim.trailing_zeros() as usize)
    }
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Returns `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let diag = CVector::from_iterator(values.len(), values.iter().map(|&v| c(f(v), 0.0)));
    &vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint()
}

/// Checks targets for an `n`-qubit register and returns their bit masks.
pub fn target_masks(targets: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut masks = Vec::with_capacity(targets.len());
    for &t in targets {
        if t >= n {
            return Err(Error::Qubits(format!("qubit {t} out of range for {n} qubits")));
        }
        if seen[t] {
            return Err(Error::Qubits(format!("qubit {t} listed twice")));
        }
        seen[t] = true;
        masks.push(1usize << (n - 1 - t));
    }
    Ok(masks)
}

/// Enumerates index groups: for every assignment of the non-target bits,
/// the `2^k` full indices ordered by the target sub-index.
fn for_each_group(masks: &[usize], n: usize, mut f: impl FnMut(&[usize])) {
    let k = masks.len();
    let all_targets: usize = masks.iter().sum();
    let sub = 1usize << k;
    let mut idx = vec![0usize; sub];
    for base in 0..(1usize << n) {
        if base & all_targets != 0 {
            continue;
        }
        for (s, slot) in idx.iter_mut().enumerate() {
            let mut full = base;
            for (j, &m) in masks.iter().enumerate() {
                if s & (1 << (k - 1 - j)) != 0 {
                    full |= m;
                }
            }
            *slot = full;
        }
        f(&idx);
    }
}

fn check_op(op: &CMatrix, targets: &[usize]) -> Result<()> {
    let expect = 1usize << targets.len();
    if op.nrows() != expect || op.ncols() != expect {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but acts on {} qubits",
            op.nrows(),
            op.ncols(),
            targets.len()
        )));
    }
    Ok(())
}

/// `(op on targets) · v` for an `n`-qubit vector.
pub fn apply_to_vector(v: &CVector, op: &CMatrix, targets: &[usize], n: usize) -> Result<CVector> {
    check_op(op, targets)?;
    let masks = target_masks(targets, n)?;
    let mut out = CVector::zeros(v.len());
    for_each_group(&masks, n, |idx| {
        for (r, &ri) in idx.iter().enumerate() {
            let mut acc = ZERO;
            for (s, &si) in idx.iter().enumerate() {
                acc += op[(r, s)] * v[si];
            }
            out[ri] = acc;
        }
    });
    Ok(out)
}

/// `(op on targets) · m`, acting on the row index of `m`.
pub fn apply_left(m: &CMatrix, op: &CMatrix, targets: &[usize], n: usize) -> Result<CMatrix> {
    check_op(op, targets)?;
    let masks = target_masks(targets, n)?;
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for_each_group(&masks, n, |idx| {
        for col in 0..m.ncols() {
            for (r, &ri) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &si) in idx.iter().enumerate() {
                    acc += op[(r, s)] * m[(si, col)];
                }
                out[(ri, col)] = acc;
            }
        }
    });
    Ok(out)
}

/// `U m U†` with `U` embedded on `targets`.
pub fn conjugate(m: &CMatrix, op: &CMatrix, targets: &[usize], n: usize) -> Result<CMatrix> {
    let left = apply_left(m, op, targets, n)?;
    let both = apply_left(&left.adjoint(), op, targets, n)?;
    Ok(both.adjoint())
}

/// Full `2^n` matrix of `op` embedded on `targets`.
pub fn embed(op: &CMatrix, targets: &[usize], n: usize) -> Result<CMatrix> {
    apply_left(&identity(1 << n), op, targets, n)
}

/// Reduced matrix over `keep` (listed in output order) of an `n`-qubit operator.
pub fn partial_trace(m: &CMatrix, keep: &[usize], n: usize) -> Result<CMatrix> {
    let keep_masks = target_masks(keep, n)?;
    let keep_all: usize = keep_masks.iter().sum();
    let traced = ((1usize << n) - 1) & !keep_all;
    let k = keep.len();
    let sub = |full: usize| -> usize {
        let mut s = 0;
        for (j, &mask) in keep_masks.iter().enumerate() {
            if full & mask != 0 {
                s |= 1 << (k - 1 - j);
            }
        }
        s
    };
    let dim = 1usize << n;
    let subs: Vec<usize> = (0..dim).map(sub).collect();
    let mut out = CMatrix::zeros(1 << k, 1 << k);
    for i in 0..dim {
        for j in 0..dim {
            if i & traced == j & traced {
                out[(subs[i], subs[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Permutes qubits so that new qubit `i` is old qubit `order[i]`.
pub fn permute_qubits(m: &CMatrix, order: &[usize], n: usize) -> Result<CMatrix> {
    if order.len() != n {
        return Err(Error::Qubits("permutation must list every qubit".into()));
    }
    let masks = target_masks(order, n)?;
    let dim = 1usize << n;
    let map: Vec<usize> = (0..dim)
        .map(|new| {
            let mut old = 0;
            for (i, &mask) in masks.iter().enumerate() {
                if new & (1 << (n - 1 - i)) != 0 {
                    old |= mask;
                }
            }
            old
        })
        .collect();
    let cols = m.ncols();
    if cols == 1 {
        return Ok(CMatrix::from_fn(dim, 1, |r, _| m[(map[r], 0)]));
    }
    Ok(CMatrix::from_fn(dim, dim, |r, col| m[(map[r], map[col])]))
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn embedded_x_on_second_qubit() {
        let full = embed(&x(), &[1], 2).unwrap();
        let expect = kron(&identity(2), &x());
        assert_eq!(full, expect);
    }

    #[test]
    fn target_order_sets_factor_order() {
        // CNOT with control listed second acts as control on qubit 1.
        let cnot = CMatrix::from_fn(4, 4, |r, col| {
            let out = if col >= 2 { col ^ 1 } else { col };
            if r == out {
                ONE
            } else {
                ZERO
            }
        });
        let reversed = embed(&cnot, &[1, 0], 2).unwrap();
        let mut v = CVector::zeros(4);
        v[1] = ONE; // |01>
        let out = &reversed * &v;
        assert_eq!(out[3], ONE); // |11>
    }

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        let ab = kron(&a, &b);
        assert!((partial_trace(&ab, &[0], 2).unwrap() - &a).norm() < 1e-14);
        assert!((partial_trace(&ab, &[1], 2).unwrap() - &b).norm() < 1e-14);
    }

    #[test]
    fn permutation_swaps_factors() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ZERO]));
        let b = CMatrix::from_diagonal(&CVector::from_vec(vec![ZERO, ONE]));
        let swapped = permute_qubits(&kron(&a, &b), &[1, 0], 2).unwrap();
        assert_eq!(swapped, kron(&b, &a));
    }

    #[test]
    fn duplicate_targets_rejected() {
        assert!(target_masks(&[0, 0], 2).is_err());
        assert!(target_masks(&[2], 2).is_err());
    }
}
