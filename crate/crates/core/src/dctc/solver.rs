//! Fixed points of the CTC channel with maximum-entropy selection.
//!
//! The channel is vectorized into a `d^2 x d^2` superoperator; its
//! eigenvalue-1 eigenspace is the null space of `S - I`, read off the SVD.
//! That space is closed under `†`, so it has a real basis of Hermitian
//! matrices. Among the unit-trace positive elements the solver maximizes von
//! Neumann entropy by gradient ascent; entropy is strictly concave, so the
//! maximizer is unique.

use serde::Serialize;

use super::channel::CtcChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::state::{functional, DensityState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Singular-value cut for the eigenvalue-1 eigenspace.
    pub eigen_tol: f64,
    /// Largest accepted trace distance between `rho` and its image.
    pub residual_tol: f64,
    /// Channel applications allowed for the averaged-iterate cross-check.
    pub max_iterations: usize,
    /// Gradient steps allowed for entropy maximization.
    pub max_gradient_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { eigen_tol: 1e-9, residual_tol: 1e-9, max_iterations: 10_000, max_gradient_steps: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointResult {
    #[serde(serialize_with = "crate::report::serialize_density")]
    pub rho_ctc: DensityState,
    pub residual: f64,
    pub degenerate: bool,
    /// Von Neumann entropy in nats.
    pub entropy: f64,
    pub fixed_space_dimension: usize,
}

/// Real basis of the Hermitian fixed space, orthonormal under `Re Tr(A† B)`.
pub fn hermitian_fixed_basis(channel: &CtcChannel, eigen_tol: f64) -> Vec<CMatrix> {
    let d = channel.ctc_dim();
    let mut m = channel.superoperator();
    for i in 0..d * d {
        m[(i, i)] -= linalg::ONE;
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut candidates = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > eigen_tol {
            continue;
        }
        let x = CMatrix::from_fn(d, d, |r, col| v_t[(k, col * d + r)].conj());
        candidates.push(linalg::hermitize(&x));
        candidates.push((&x - x.adjoint()).scale(0.5) * c(0.0, -1.0));
    }
    orthonormalize(candidates)
}

fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn orthonormalize(candidates: Vec<CMatrix>) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    for mut v in candidates {
        for _ in 0..2 {
            for b in &basis {
                let p = real_inner(b, &v);
                v -= b.scale(p);
            }
        }
        let norm = real_inner(&v, &v).sqrt();
        if norm > 1e-6 {
            basis.push(v.unscale(norm));
        }
    }
    basis
}

/// Binomially averaged iterates `rho <- (rho + Phi(rho)) / 2` from `I/d`.
///
/// The averaged map shares the fixed points of `Phi` but has no other
/// eigenvalues on the unit circle, so the iterates converge geometrically to
/// the same limit as the Cesàro mean of `Phi^n(I/d)`. Returns the iterate and
/// the number of channel applications used.
pub fn averaged_iterate(channel: &CtcChannel, max_iterations: usize, tol: f64) -> (CMatrix, usize) {
    let d = channel.ctc_dim();
    let mut rho = linalg::identity(d).unscale(d as f64);
    for it in 1..=max_iterations {
        let next = (&rho + channel.apply(&rho)).scale(0.5);
        let step = functional::matrix_trace_distance(&next, &rho);
        rho = next;
        if step < tol {
            return (linalg::hermitize(&rho), it);
        }
    }
    (linalg::hermitize(&rho), max_iterations)
}

fn entropy_and_log(rho: &CMatrix) -> (f64, CMatrix, f64) {
    let (values, vectors) = linalg::hermitian_eigen(rho);
    let min = values.first().copied().unwrap_or(0.0);
    let entropy = functional::entropy_of_spectrum(&values);
    let logs = linalg::CVector::from_iterator(values.len(), values.iter().map(|&l| c(l.max(1e-300).ln(), 0.0)));
    let log = &vectors * CMatrix::from_diagonal(&logs) * vectors.adjoint();
    (entropy, log, min)
}

/// Maximizes entropy over `start + span(directions)` within the PSD cone.
/// `directions` must be traceless, Hermitian and orthonormal.
fn maximize_entropy(start: CMatrix, directions: &[CMatrix], max_steps: usize) -> CMatrix {
    if directions.is_empty() {
        return start;
    }
    let mut rho = start;
    let (mut entropy, mut log, _) = entropy_and_log(&rho);
    let mut alpha = 1.0;
    for _ in 0..max_steps {
        let grad: Vec<f64> = directions.iter().map(|b| -real_inner(&log, b)).collect();
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2.sqrt() < 1e-12 {
            break;
        }
        let mut accepted = false;
        while alpha > 1e-18 {
            let mut cand = rho.clone();
            for (b, g) in directions.iter().zip(&grad) {
                cand += b.scale(alpha * g);
            }
            let (e, l, min) = entropy_and_log(&cand);
            if min >= -1e-14 && e >= entropy + 1e-4 * alpha * g2 {
                rho = cand;
                entropy = e;
                log = l;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        alpha *= 2.0;
    }
    rho
}

/// Maximum-entropy density matrix in the fixed space of the CTC channel.
pub fn solve_channel(channel: &CtcChannel, config: &SolverConfig) -> Result<FixedPointResult> {
    let basis = hermitian_fixed_basis(channel, config.eigen_tol);
    let dimension = basis.len();
    if dimension == 0 {
        return Err(Error::NoConvergence { residual: f64::INFINITY });
    }
    let rho = if dimension == 1 {
        let h = &basis[0];
        let tr = linalg::trace(h).re;
        if tr.abs() < 1e-12 {
            return Err(Error::NoConvergence { residual: f64::INFINITY });
        }
        h.unscale(tr)
    } else {
        // A maximal-support fixed state, then entropy ascent inside the
        // traceless part of the fixed space.
        let (start, _) = averaged_iterate(channel, config.max_iterations, 1e-15);
        let start = project_onto_span(&start, &basis);
        let start = start.unscale(linalg::trace(&start).re);
        let traces: Vec<f64> = basis.iter().map(|b| linalg::trace(b).re).collect();
        let tnorm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
        let traceless: Vec<CMatrix> = basis
            .iter()
            .zip(&traces)
            .map(|(b, t)| {
                let mut v = b.clone();
                for (b2, t2) in basis.iter().zip(&traces) {
                    v -= b2.scale(t * t2 / (tnorm * tnorm));
                }
                v
            })
            .collect();
        let directions = orthonormalize(traceless);
        maximize_entropy(start, &directions, config.max_gradient_steps)
    };
    let rho = linalg::hermitize(&rho);
    let residual = functional::matrix_trace_distance(&channel.apply(&rho), &rho);
    if residual > config.residual_tol {
        return Err(Error::NoConvergence { residual });
    }
    let rho_ctc = DensityState::from_matrix_unchecked(rho);
    let entropy = crate::state::von_neumann_entropy(&rho_ctc);
    Ok(FixedPointResult { rho_ctc, residual, degenerate: dimension > 1, entropy, fixed_space_dimension: dimension })
}

fn project_onto_span(x: &CMatrix, basis: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for b in basis {
        out += b.scale(real_inner(b, x));
    }
    out
}

/// Solves the Deutsch consistency condition for a CR input and a circuit
/// unitary over CR ⊗ CTC wires.
pub fn solve_fixed_point(rho_cr: &DensityState, u: &CMatrix) -> Result<FixedPointResult> {
    solve_fixed_point_with(rho_cr, u, &SolverConfig::default())
}

pub fn solve_fixed_point_with(rho_cr: &DensityState, u: &CMatrix, config: &SolverConfig) -> Result<FixedPointResult> {
    let channel = CtcChannel::new(rho_cr, u)?;
    solve_channel(&channel, config)
}
