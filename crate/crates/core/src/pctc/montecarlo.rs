//! Conventional-teleportation sampling of the P-CTC construction.
//!
//! Each trial measures every pair in the Bell basis after the interaction and
//! keeps the trial only when all pairs read `phi+`. Trials are split into
//! batches of [`BATCH_SIZE`]; batch `b` draws from `ChaCha8Rng` seeded with the
//! run seed on stream `b`, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_dims, contract_tail, interacted_vector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::state::{Bell, DensityState, PureState, State};

pub const BATCH_SIZE: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportTrialLog {
    pub trials: u64,
    pub accepted: u64,
    /// Counts per joint Bell outcome, indexed in base 4 over the pairs with
    /// digits `phi+ = 0, phi- = 1, psi+ = 2, psi- = 3`.
    pub histogram: Vec<u64>,
    /// Average conditional CR state over accepted trials.
    #[serde(serialize_with = "crate::report::serialize_opt_density")]
    pub conditional_state: Option<DensityState>,
    pub seed: u64,
    /// Exact acceptance probability.
    pub analytic_weight: f64,
    /// True when no trial can ever be accepted.
    pub analytic_null: bool,
}

impl TeleportTrialLog {
    pub fn acceptance_frequency(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }
}

/// Joint Bell-basis vector for outcome index `o` (base-4 digits, first pair
/// most significant) with qubits ordered `first.., second..`.
fn joint_bell_vector(o: usize, pairs: usize) -> CVector {
    let mut v = CVector::from_element(1, linalg::ONE);
    for i in 0..pairs {
        let digit = (o >> (2 * (pairs - 1 - i))) & 3;
        v = linalg::kron_vec(&v, PureState::bell(Bell::ALL[digit]).amplitudes());
    }
    let order: Vec<usize> = (0..pairs).map(|i| 2 * i).chain((0..pairs).map(|i| 2 * i + 1)).collect();
    let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
    let p = linalg::permute_qubits(&m, &order, 2 * pairs).expect("valid permutation");
    CVector::from_column_slice(p.as_slice())
}

struct Component {
    prob: f64,
    outcome_cdf: Vec<f64>,
    accepted_state: Option<CMatrix>,
}

fn components(cr_state: &State, u: &CMatrix, ctc_wires: usize) -> Result<Vec<Component>> {
    let pure_parts: Vec<(f64, PureState)> = match cr_state {
        State::Pure(p) => vec![(1.0, p.clone())],
        State::Density(rho) => {
            let (values, vectors) = linalg::hermitian_eigen(rho.matrix());
            values
                .iter()
                .enumerate()
                .filter(|(_, &l)| l > 1e-14)
                .map(|(i, &l)| (l, PureState::from_vector_unchecked(vectors.column(i).normalize())))
                .collect()
        }
    };
    let outcomes = 1usize << (2 * ctc_wires);
    let bells: Vec<CVector> = (0..outcomes).map(|o| joint_bell_vector(o, ctc_wires)).collect();
    pure_parts
        .into_iter()
        .map(|(prob, psi)| {
            let v = interacted_vector(&psi, u, ctc_wires)?;
            let mut cdf = Vec::with_capacity(outcomes);
            let mut acc = 0.0;
            let mut accepted_state = None;
            for (o, b) in bells.iter().enumerate() {
                let branch = contract_tail(&v, b);
                let w = branch.norm_squared();
                acc += w;
                cdf.push(acc);
                if o == 0 && w >= crate::state::NULL_WEIGHT {
                    accepted_state = Some(linalg::outer(&branch.unscale(w.sqrt())));
                }
            }
            Ok(Component { prob, outcome_cdf: cdf, accepted_state })
        })
        .collect()
}

fn pick(cdf: &[f64], r: f64) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let target = r * total;
    cdf.iter().position(|&c| target < c).unwrap_or(cdf.len() - 1)
}

struct BatchResult {
    histogram: Vec<u64>,
    accepted: u64,
    state_sum: CMatrix,
}

/// Samples `trials` runs of the teleportation-with-post-selection protocol.
pub fn montecarlo_teleport(
    cr_state: &State,
    u: &CMatrix,
    ctc_wires: usize,
    trials: u64,
    seed: u64,
) -> Result<TeleportTrialLog> {
    if trials == 0 {
        return Err(Error::Scenario("trials must be at least 1".into()));
    }
    check_dims(cr_state.qubits(), u, ctc_wires)?;
    let comps = components(cr_state, u, ctc_wires)?;
    let comp_cdf: Vec<f64> = comps
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c.prob;
            Some(*acc)
        })
        .collect();
    let analytic_weight: f64 = comps.iter().map(|c| c.prob * c.outcome_cdf[0]).sum();
    let outcomes = 1usize << (2 * ctc_wires);
    let cr_dim = 1usize << cr_state.qubits();

    let batches = trials.div_ceil(BATCH_SIZE);
    let results: Vec<BatchResult> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH_SIZE.min(trials - b * BATCH_SIZE);
            let mut histogram = vec![0u64; outcomes];
            let mut accepted = 0u64;
            let mut state_sum = CMatrix::zeros(cr_dim, cr_dim);
            for _ in 0..count {
                let ci = pick(&comp_cdf, rng.random::<f64>());
                let comp = &comps[ci];
                let o = pick(&comp.outcome_cdf, rng.random::<f64>());
                histogram[o] += 1;
                if o == 0 {
                    if let Some(s) = &comp.accepted_state {
                        accepted += 1;
                        state_sum += s;
                    }
                }
            }
            BatchResult { histogram, accepted, state_sum }
        })
        .collect();

    let mut histogram = vec![0u64; outcomes];
    let mut accepted = 0;
    let mut state_sum = CMatrix::zeros(cr_dim, cr_dim);
    for r in &results {
        for (h, x) in histogram.iter_mut().zip(&r.histogram) {
            *h += x;
        }
        accepted += r.accepted;
        state_sum += &r.state_sum;
    }
    let conditional_state =
        (accepted > 0).then(|| DensityState::from_matrix_unchecked(state_sum.unscale(accepted as f64)));
    Ok(TeleportTrialLog {
        trials,
        accepted,
        histogram,
        conditional_state,
        seed,
        analytic_weight,
        analytic_null: analytic_weight < crate::state::NULL_WEIGHT,
    })
}
