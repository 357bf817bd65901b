use serde::{Deserialize, Serialize};

use super::{tol, DensityVector, EigenSystem, Event, ReducedEvent, WordId};
use crate::error::{Error, Result};
use crate::ids::StatementId;

/// Eigenvector over global word ids, sorted by id, zeros omitted.
pub type SparseVector = Vec<(WordId, f64)>;

/// A statement's truncated eigen form: `h` renormalized eigenvalues and
/// their eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySystem {
    pub statement_id: StatementId,
    pub h: usize,
    pub val: DensityVector,
    pub vec: Vec<SparseVector>,
}

impl DensitySystem {
    pub fn check(&self) -> Result<()> {
        if self.h == 0 || self.val.len() != self.h || self.vec.len() != self.h {
            return Err(Error::Invariant(format!(
                "statement {}: h={} with {} values and {} vectors",
                self.statement_id,
                self.h,
                self.val.len(),
                self.vec.len()
            )));
        }
        if self.val.as_slice().iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Invariant(format!(
                "statement {}: nonpositive kept eigenvalue",
                self.statement_id
            )));
        }
        let sum: f64 = self.val.as_slice().iter().sum();
        if (sum - 1.0).abs() > tol::SIMPLEX {
            return Err(Error::Invariant(format!(
                "statement {}: eigenvalues sum to {sum}",
                self.statement_id
            )));
        }
        Ok(())
    }

    /// Words with a nonzero component in some kept eigenvector.
    pub fn support(&self) -> Vec<WordId> {
        let mut words: Vec<WordId> = self.vec.iter().flatten().map(|&(w, _)| w).collect();
        words.sort();
        words.dedup();
        words
    }
}

/// Keeps the fewest leading eigenpairs holding at least `threshold` of the
/// mass, then renormalizes the kept eigenvalues.
pub fn pca_truncate(es: &EigenSystem, threshold: f64, statement_id: StatementId) -> Result<DensitySystem> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Argument(format!("pca threshold {threshold} not in (0, 1]")));
    }
    let total: f64 = es.values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Invariant("eigenvalues sum to zero".into()));
    }
    // Relative target absorbs rounding in Σλ so that threshold 1.0 keeps
    // exactly the nonzero eigenvalues.
    let target = threshold - 1e-12;
    let mut h = 0;
    let mut mass = 0.0;
    for &lambda in &es.values {
        if !(lambda > 0.0) {
            break;
        }
        h += 1;
        mass += lambda;
        if mass / total >= target {
            break;
        }
    }
    let kept = &es.values[..h];
    let kept_sum: f64 = kept.iter().sum();
    let val = DensityVector::new(kept.iter().map(|l| l / kept_sum).collect())?;
    let vec = es.vectors[..h]
        .iter()
        .map(|v| {
            es.basis
                .iter()
                .zip(v)
                .filter(|(_, a)| **a != 0.0)
                .map(|(&w, &a)| (w, a))
                .collect()
        })
        .collect();
    let ds = DensitySystem {
        statement_id,
        h,
        val,
        vec,
    };
    ds.check()?;
    Ok(ds)
}

fn sparse_dot(ket: &[(WordId, f64)], v: &[(WordId, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < ket.len() && j < v.len() {
        match ket[i].0.cmp(&v[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += ket[i].1 * v[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Rotates an event into the kept eigenbasis and renormalizes its squared
/// components. Events orthogonal to the kept space are marked absent.
pub fn reduce_event(event: &Event, ds: &DensitySystem) -> ReducedEvent {
    let amps: Vec<f64> = ds.vec.iter().map(|v| sparse_dot(event.ket.components(), v)).collect();
    let mass: f64 = amps.iter().map(|a| a * a).sum();
    if mass < tol::ABSENT {
        return ReducedEvent {
            sq: vec![0.0; ds.h],
            present: false,
        };
    }
    ReducedEvent {
        sq: amps.iter().map(|a| a * a / mass).collect(),
        present: true,
    }
}
