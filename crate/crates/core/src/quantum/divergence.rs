use super::{DensityVector, EigenSystem};
use crate::error::{Error, Result};

const FLOOR: f64 = 1e-12;

/// Σᵢ β_qᵢ ln max(β_stᵢ, 1e-12). Higher means more relevant.
pub fn vnd_score(beta_q: &DensityVector, val_st: &DensityVector) -> Result<f64> {
    if beta_q.len() != val_st.len() {
        return Err(Error::Argument(format!(
            "query density has {} entries, statement has {}",
            beta_q.len(),
            val_st.len()
        )));
    }
    Ok(beta_q
        .as_slice()
        .iter()
        .zip(val_st.as_slice())
        .map(|(q, s)| q * s.max(FLOOR).ln())
        .sum())
}

/// Σᵢ λ_qᵢ Σⱼ ln max(λ_cⱼ, 1e-12) ⟨qᵢ|cⱼ⟩², with the overlap taken through
/// the global word ids of both bases.
pub fn vnd_full(es_q: &EigenSystem, es_c: &EigenSystem) -> f64 {
    let logs: Vec<f64> = es_c.values.iter().map(|l| l.max(FLOOR).ln()).collect();
    let mut total = 0.0;
    for (lq, q) in es_q.values.iter().zip(&es_q.vectors) {
        if *lq == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (log_c, c) in logs.iter().zip(&es_c.vectors) {
            let overlap = overlap(&es_q.basis, q, &es_c.basis, c);
            inner += log_c * overlap * overlap;
        }
        total += lq * inner;
    }
    total
}

fn overlap(
    basis_a: &[crate::ids::WordId],
    a: &[f64],
    basis_b: &[crate::ids::WordId],
    b: &[f64],
) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < basis_a.len() && j < basis_b.len() {
        match basis_a[i].cmp(&basis_b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i] * b[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}
