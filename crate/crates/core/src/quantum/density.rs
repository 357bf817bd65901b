use serde::{Deserialize, Serialize};

use super::{tol, Event, WordId};
use crate::error::{Error, Result};

/// Symmetric, positive semidefinite, unit-trace matrix over a local basis.
///
/// Row `i` corresponds to the global word `basis[i]`; the basis is sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Vec<WordId>,
    entries: Vec<f64>,
}

impl DensityMatrix {
    /// Wraps row-major entries without checking the density invariants.
    /// The basis must be sorted and free of duplicates.
    pub fn from_entries(basis: Vec<WordId>, entries: Vec<f64>) -> Result<Self> {
        let m = basis.len();
        if entries.len() != m * m {
            return Err(Error::Argument(format!(
                "{} entries for a {m}x{m} matrix",
                entries.len()
            )));
        }
        if basis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("basis must be strictly increasing".into()));
        }
        Ok(DensityMatrix { basis, entries })
    }

    /// Like [`from_entries`](Self::from_entries) but also checks the density
    /// invariants.
    pub fn new(basis: Vec<WordId>, entries: Vec<f64>) -> Result<Self> {
        let rho = Self::from_entries(basis, entries)?;
        rho.check()?;
        Ok(rho)
    }

    /// The maximally mixed state I/m.
    pub fn maximally_mixed(basis: Vec<WordId>) -> Result<Self> {
        let m = basis.len();
        if m == 0 {
            return Err(Error::Argument("empty basis".into()));
        }
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            entries[i * m + i] = 1.0 / m as f64;
        }
        Self::from_entries(basis, entries)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[WordId] {
        &self.basis
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Local index of a global word, if it is in the basis.
    pub fn local_index(&self, word: WordId) -> Option<usize> {
        self.basis.binary_search(&word).ok()
    }

    /// Dense local coordinates of an event's ket; words outside the basis
    /// are dropped.
    pub fn local_ket(&self, event: &Event) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        for &(w, a) in event.ket.components() {
            if let Some(i) = self.local_index(w) {
                u[i] = a;
            }
        }
        u
    }

    /// Verifies symmetry, unit trace and positive semidefiniteness.
    pub fn check(&self) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym > tol::SYMMETRY {
            return Err(Error::Invariant(format!("density matrix asymmetry {asym:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::Invariant(format!("density matrix trace {tr}")));
        }
        // Eigendecomposition rejects eigenvalues below -1e-10.
        super::eigendecompose(self).map(drop)
    }

    /// Frobenius distance to another matrix on the same basis.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// uᵀρu for a dense local vector.
pub(crate) fn quadratic_form(rho: &DensityMatrix, u: &[f64]) -> f64 {
    let m = rho.dim();
    let mut total = 0.0;
    for i in 0..m {
        if u[i] == 0.0 {
            continue;
        }
        let row = &rho.entries[i * m..(i + 1) * m];
        let mut acc = 0.0;
        for j in 0..m {
            acc += row[j] * u[j];
        }
        total += u[i] * acc;
    }
    total
}

/// Tr(ρ|u⟩⟨u|). Event words outside the basis contribute nothing.
pub fn trace_probability(rho: &DensityMatrix, event: &Event) -> f64 {
    let u = rho.local_ket(event);
    quadratic_form(rho, &u).clamp(0.0, 1.0)
}

/// Diagonal density: nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DensityVector {
    beta: Vec<f64>,
}

impl DensityVector {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Argument("empty density vector".into()));
        }
        if let Some(b) = beta.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
            return Err(Error::Invariant(format!("density vector entry {b}")));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > tol::SIMPLEX {
            return Err(Error::Invariant(format!("density vector sums to {sum}")));
        }
        Ok(DensityVector { beta })
    }

    pub fn uniform(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::Argument("empty density vector".into()));
        }
        Ok(DensityVector {
            beta: vec![1.0 / h as f64; h],
        })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.beta
    }
}

/// An event rotated into a truncated eigenbasis: its squared components.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEvent {
    pub sq: Vec<f64>,
    pub present: bool,
}

/// ⟨ρ|Π²⟩ = Σⱼ βⱼ sqⱼ.
pub fn vector_probability(beta: &DensityVector, re: &ReducedEvent) -> Result<f64> {
    if beta.len() != re.sq.len() {
        return Err(Error::Argument(format!(
            "density vector has {} entries, event has {}",
            beta.len(),
            re.sq.len()
        )));
    }
    Ok(dot(beta.as_slice(), &re.sq))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
