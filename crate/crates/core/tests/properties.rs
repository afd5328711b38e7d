//! Property-based invariants across the state, circuit and CTC layers.

mod common;

use ctcsim::circuit::{assemble_unitary, parse_circuit, print_circuit, validate, Circuit, Gate, GateKind, Polarity};
use ctcsim::dctc::{ctc_map, solve_fixed_point};
use ctcsim::linalg::{self, kron};
use ctcsim::pctc::{evolve_postselected, NullPolicy};
use ctcsim::state::{format_state, parse_state, trace_distance, von_neumann_entropy, DensityState, State};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn min_eigenvalue(rho: &DensityState) -> f64 {
    rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
}

fn unit_trace(rho: &DensityState) -> bool {
    (rho.matrix().trace().re - 1.0).abs() < TOL
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assembled_circuits_are_unitary(seed in any::<u64>(), cr in 1usize..=3, ctc in 0usize..=2, steps in 0usize..12) {
        let circuit = common::random_circuit(&mut common::rng(seed), cr, ctc, steps);
        prop_assert!(validate(&circuit).is_empty());
        let u = assemble_unitary(&circuit).unwrap();
        prop_assert!(linalg::unitarity_deviation(&u) < 1e-10);
    }

    #[test]
    fn partial_trace_recovers_factors(seed in any::<u64>(), na in 1usize..=2, nb in 1usize..=2) {
        let mut rng = common::rng(seed);
        let a = common::random_density(&mut rng, na);
        let b = common::random_density(&mut rng, nb);
        let joint = a.tensor(&b).unwrap();
        let keep_a: Vec<usize> = (0..na).collect();
        let keep_b: Vec<usize> = (na..na + nb).collect();
        prop_assert!(trace_distance(&joint.partial_trace(&keep_a).unwrap(), &a).unwrap() < TOL);
        prop_assert!(trace_distance(&joint.partial_trace(&keep_b).unwrap(), &b).unwrap() < TOL);
    }

    #[test]
    fn partial_trace_of_entangled_state_is_a_state(seed in any::<u64>(), n in 2usize..=4, keep_mask in 1u32..15) {
        let mut rng = common::rng(seed);
        let psi = common::random_pure(&mut rng, n).to_density();
        let keep: Vec<usize> = (0..n).filter(|q| keep_mask & (1 << q) != 0).collect();
        prop_assume!(!keep.is_empty());
        if keep.len() == n {
            prop_assert!(psi.partial_trace(&keep).is_err());
            return Ok(());
        }
        let reduced = psi.partial_trace(&keep).unwrap();
        prop_assert!(unit_trace(&reduced));
        prop_assert!(min_eigenvalue(&reduced) > -TOL);
        // Complementary reductions of a pure state share their spectrum.
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let other = psi.partial_trace(&rest).unwrap();
        prop_assert!((von_neumann_entropy(&reduced) - von_neumann_entropy(&other)).abs() < 1e-8);
    }

    #[test]
    fn entropy_bounds_and_invariance(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = common::rng(seed);
        let rho = common::random_density(&mut rng, n);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -TOL && s <= n as f64 * std::f64::consts::LN_2 + TOL);
        let u = common::random_unitary(&mut rng, 1 << n);
        let all: Vec<usize> = (0..n).collect();
        let rotated = rho.apply_unitary(&u, &all).unwrap();
        prop_assert!((von_neumann_entropy(&rotated) - s).abs() < 1e-8);
        prop_assert!(von_neumann_entropy(&common::random_pure(&mut rng, n).to_density()).abs() < 1e-8);
    }

    #[test]
    fn on_zero_control_is_x_conjugated_on_one(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = common::rng(seed);
        let body = Gate::custom("V", common::random_unitary(&mut rng, 2), vec![n - 1]);
        let white = Circuit::new(n, 0).controlled(&[(0, Polarity::OnZero)], body.clone());
        let black = Circuit::new(n, 0)
            .gate(GateKind::X, &[0])
            .controlled(&[(0, Polarity::OnOne)], body)
            .gate(GateKind::X, &[0]);
        let diff = assemble_unitary(&white).unwrap() - assemble_unitary(&black).unwrap();
        prop_assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn printed_circuits_parse_back(seed in any::<u64>(), cr in 1usize..=3, ctc in 0usize..=2, steps in 0usize..10, init in any::<bool>()) {
        let mut rng = common::rng(seed);
        let mut circuit = common::random_circuit(&mut rng, cr, ctc, steps);
        if init {
            circuit = circuit.init(cr - 1, (seed & 1) as u8);
        }
        let text = print_circuit(&circuit);
        let parsed = parse_circuit(&text).unwrap();
        prop_assert_eq!(&parsed, &circuit);
        prop_assert_eq!(print_circuit(&parsed), text);
    }

    #[test]
    fn state_files_round_trip(seed in any::<u64>(), n in 1usize..=3, pure in any::<bool>()) {
        let mut rng = common::rng(seed);
        let state: State = if pure {
            common::random_pure(&mut rng, n).into()
        } else {
            common::random_density(&mut rng, n).into()
        };
        let back = parse_state(&format_state(&state)).unwrap();
        prop_assert_eq!(back.qubits(), n);
        prop_assert!(trace_distance(&back.to_density(), &state.to_density()).unwrap() < 1e-12);
    }

    #[test]
    fn ctc_map_is_trace_preserving_and_positive(seed in any::<u64>(), cr in 1usize..=2, ctc in 1usize..=2) {
        let mut rng = common::rng(seed);
        let u = assemble_unitary(&common::random_circuit(&mut rng, cr, ctc, 8)).unwrap();
        let rho_cr = common::random_density(&mut rng, cr);
        let rho_ctc = common::random_density(&mut rng, ctc);
        let out = ctc_map(&rho_ctc, &rho_cr, &u).unwrap();
        prop_assert!(unit_trace(&out));
        prop_assert!(min_eigenvalue(&out) > -TOL);
    }

    #[test]
    fn fixed_points_are_fixed(seed in any::<u64>(), cr in 1usize..=2, ctc in 1usize..=2) {
        let mut rng = common::rng(seed);
        let u = assemble_unitary(&common::random_circuit(&mut rng, cr, ctc, 8)).unwrap();
        let rho_cr = common::random_density(&mut rng, cr);
        let fp = solve_fixed_point(&rho_cr, &u).unwrap();
        prop_assert!(fp.residual <= 1e-9);
        prop_assert!(unit_trace(&fp.rho_ctc));
        prop_assert!(min_eigenvalue(&fp.rho_ctc) > -1e-8);
        let image = ctc_map(&fp.rho_ctc, &rho_cr, &u).unwrap();
        prop_assert!(trace_distance(&image, &fp.rho_ctc).unwrap() <= 1e-9);
    }

    #[test]
    fn postselection_weight_is_a_probability(seed in any::<u64>(), cr in 1usize..=2, ctc in 1usize..=2) {
        let mut rng = common::rng(seed);
        let u = assemble_unitary(&common::random_circuit(&mut rng, cr, ctc, 8)).unwrap();
        let input: State = common::random_density(&mut rng, cr).into();
        let out = evolve_postselected(&input, &u, ctc, NullPolicy::FlagForbidden).unwrap();
        prop_assert!(out.weight >= 0.0 && out.weight <= 1.0 + TOL);
        prop_assert_eq!(out.null, out.state.is_none());
        if let Some(s) = out.state {
            prop_assert!(unit_trace(&s.to_density()));
        }
    }

    #[test]
    fn ctc_free_postselection_is_plain_evolution(seed in any::<u64>(), n in 1usize..=2) {
        // A CTC wire the circuit never touches leaves the CR evolution unitary.
        let mut rng = common::rng(seed);
        let v = common::random_unitary(&mut rng, 1 << n);
        let u = kron(&v, &linalg::identity(2));
        let rho = common::random_density(&mut rng, n);
        let out = evolve_postselected(&rho.clone().into(), &u, 1, NullPolicy::ErrorOnNull).unwrap();
        prop_assert!((out.weight - 1.0).abs() < TOL);
        let all: Vec<usize> = (0..n).collect();
        let want = rho.apply_unitary(&v, &all).unwrap();
        prop_assert!(trace_distance(&out.state.unwrap().to_density(), &want).unwrap() < TOL);
    }
}
