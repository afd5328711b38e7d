//! Deutsch (fixed-point) semantics for CTC interactions.
//!
//! For a CR input `rho_cr` and a circuit unitary `U` on CR ⊗ CTC wires, the
//! CTC register must satisfy `rho_ctc = Tr_CR[U (rho_cr ⊗ rho_ctc) U†]`. The
//! CR output is `Tr_CTC[U (rho_cr ⊗ rho_ctc) U†]` for the maximum-entropy
//! solution. Because `rho_ctc` depends on the input, the evolution is
//! nonlinear: a proper mixture evolves member by member, which differs from
//! evolving its average.

mod channel;
mod solver;

pub use channel::{ctc_map, CtcChannel};
pub use solver::{
    averaged_iterate, hermitian_fixed_basis, solve_channel, solve_fixed_point, solve_fixed_point_with,
    FixedPointResult, SolverConfig,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{DensityState, Ensemble, State};

/// CR output of a D-CTC interaction together with the solved CTC state.
pub fn evolve_cr_density(rho_cr: &DensityState, u: &CMatrix) -> Result<(DensityState, FixedPointResult)> {
    let fp = solve_fixed_point(rho_cr, u)?;
    let joint = rho_cr.tensor(&fp.rho_ctc)?;
    let n = joint.qubits();
    let all: Vec<usize> = (0..n).collect();
    let evolved = joint.apply_unitary(u, &all)?;
    let keep: Vec<usize> = (0..rho_cr.qubits()).collect();
    Ok((evolved.reduce_to(&keep)?, fp))
}

/// Member-wise evolution of a proper mixture; probabilities carry through.
pub fn evolve_cr_ensemble(ensemble: &Ensemble, u: &CMatrix) -> Result<Ensemble> {
    let members = ensemble
        .members()
        .par_iter()
        .map(|(p, s)| evolve_cr_density(&s.to_density(), u).map(|(out, _)| (*p, State::Density(out))))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(members)
}

/// D-CTC interaction on the `wires` of a larger register.
///
/// The fixed point is solved for the reduced state of `wires`; the returned
/// state is the whole register after `U` acts on `wires` ⊗ CTC and the CTC is
/// traced out. Correlations with untouched qubits are kept.
pub fn evolve_embedded(
    global: &DensityState,
    wires: &[usize],
    u: &CMatrix,
) -> Result<(DensityState, FixedPointResult)> {
    let n = global.qubits();
    linalg::target_masks(wires, n)?;
    let cr_dim = 1usize << wires.len();
    if !u.nrows().is_multiple_of(cr_dim) {
        return Err(Error::Dimension(format!(
            "unitary of size {} does not act on {} CR wires",
            u.nrows(),
            wires.len()
        )));
    }
    let reduced = global.reduce_to(wires)?;
    let fp = solve_fixed_point(&reduced, u)?;
    let ctc_qubits = fp.rho_ctc.qubits();
    let joint = global.tensor(&fp.rho_ctc)?;
    let targets: Vec<usize> = wires.iter().copied().chain(n..n + ctc_qubits).collect();
    let evolved = joint.apply_unitary(u, &targets)?;
    let keep: Vec<usize> = (0..n).collect();
    Ok((evolved.reduce_to(&keep)?, fp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{assemble_unitary, bhw_circuit, Circuit, GateKind};
    use crate::state::{trace_distance, PureState};

    fn bhw() -> CMatrix {
        assemble_unitary(&bhw_circuit()).unwrap()
    }

    fn cr_input(psi: PureState) -> DensityState {
        psi.tensor(&PureState::zero()).unwrap().to_density()
    }

    #[test]
    fn identity_leaves_ctc_state_unchanged() {
        let u = linalg::identity(4);
        let ctc = PureState::plus().to_density();
        let out = ctc_map(&ctc, &DensityState::basis(&[1]).unwrap(), &u).unwrap();
        assert!(trace_distance(&out, &ctc).unwrap() < 1e-14);
    }

    #[test]
    fn bhw_map_fixes_the_plus_solution() {
        let ctc = DensityState::basis(&[1, 0]).unwrap();
        let out = ctc_map(&ctc, &cr_input(PureState::plus()), &bhw()).unwrap();
        assert!(trace_distance(&out, &ctc).unwrap() < 1e-12);
    }

    #[test]
    fn bhw_map_fixes_maximally_mixed() {
        let ctc = DensityState::maximally_mixed(2).unwrap();
        let cr = DensityState::maximally_mixed(1).unwrap().tensor(&DensityState::basis(&[0]).unwrap()).unwrap();
        let out = ctc_map(&ctc, &cr, &bhw()).unwrap();
        assert!(trace_distance(&out, &ctc).unwrap() < 1e-12);
    }

    #[test]
    fn ctc_map_dimension_mismatch() {
        let ctc = DensityState::maximally_mixed(1).unwrap();
        assert!(matches!(ctc_map(&ctc, &cr_input(PureState::plus()), &bhw()), Err(Error::Dimension(_))));
    }

    #[test]
    fn minus_input_solution() {
        let fp = solve_fixed_point(&cr_input(PureState::minus()), &bhw()).unwrap();
        let expect = DensityState::basis(&[1, 1]).unwrap();
        assert!(trace_distance(&fp.rho_ctc, &expect).unwrap() < 1e-9);
        assert!(!fp.degenerate);
        assert!(fp.residual <= 1e-9);
    }

    #[test]
    fn grandfather_bit_is_degenerate_and_maximally_mixed() {
        let c = Circuit::new(1, 1).gate(GateKind::X, &[1]);
        let u = assemble_unitary(&c).unwrap();
        for cr in [DensityState::basis(&[0]).unwrap(), PureState::plus().to_density()] {
            let fp = solve_fixed_point(&cr, &u).unwrap();
            assert!(fp.degenerate);
            assert_eq!(fp.fixed_space_dimension, 2);
            let half = DensityState::maximally_mixed(1).unwrap();
            assert!(trace_distance(&fp.rho_ctc, &half).unwrap() < 1e-8);
            assert!((fp.entropy - std::f64::consts::LN_2).abs() < 1e-9);
        }
    }

    #[test]
    fn plus_input_reads_a1_b0() {
        let (out, _) = evolve_cr_density(&cr_input(PureState::plus()), &bhw()).unwrap();
        assert!((out.probability_of(&[0, 1], &[1, 0]).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_evolution_returns_input() {
        let cr = cr_input(PureState::plus());
        let u = linalg::identity(8);
        let (out, fp) = evolve_cr_density(&cr, &u).unwrap();
        assert!(trace_distance(&out, &cr).unwrap() < 1e-12);
        assert!(fp.degenerate);
    }

    #[test]
    fn singleton_ensemble_matches_density_evolution() {
        let cr = cr_input(PureState::minus());
        let e = Ensemble::singleton(State::Density(cr.clone()));
        let out = evolve_cr_ensemble(&e, &bhw()).unwrap();
        let (direct, _) = evolve_cr_density(&cr, &bhw()).unwrap();
        assert!(trace_distance(&out.members()[0].1.to_density(), &direct).unwrap() < 1e-12);
    }
}
