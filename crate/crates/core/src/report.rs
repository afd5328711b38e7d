//! JSON, CSV and text rendering of results.
//!
//! JSON is the machine contract. Matrices serialize as rows of `[re, im]`
//! pairs.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::linalg::CMatrix;
use crate::state::DensityState;

pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|r| {
                serde_json::Value::Array(
                    (0..m.ncols()).map(|col| serde_json::json!([m[(r, col)].re, m[(r, col)].im])).collect(),
                )
            })
            .collect(),
    )
}

pub fn serialize_density<S: Serializer>(rho: &DensityState, s: S) -> Result<S::Ok, S::Error> {
    let m = rho.matrix();
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

pub fn serialize_opt_density<S: Serializer>(rho: &Option<DensityState>, s: S) -> Result<S::Ok, S::Error> {
    match rho {
        Some(r) => serialize_density(r, s),
        None => s.serialize_none(),
    }
}

/// Parses a matrix written by [`matrix_json`].
pub fn matrix_from_json(v: &serde_json::Value) -> Option<CMatrix> {
    let rows = v.as_array()?;
    let n = rows.len();
    let mut m = CMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        let cols = row.as_array()?;
        if cols.len() != n {
            return None;
        }
        for (col, e) in cols.iter().enumerate() {
            let pair = e.as_array()?;
            m[(r, col)] = crate::linalg::c(pair.first()?.as_f64()?, pair.get(1)?.as_f64()?);
        }
    }
    Some(m)
}

pub fn serialize_density_vec<S: Serializer>(rhos: &[DensityState], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rhos.len()))?;
    for r in rhos {
        seq.serialize_element(&matrix_json(r.matrix()))?;
    }
    seq.end()
}
