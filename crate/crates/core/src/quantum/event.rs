use serde::{Deserialize, Serialize};

use super::{tol, WordId};
use crate::error::{Error, Result};

/// Sparse real unit vector over word ids, sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ket {
    components: Vec<(WordId, f64)>,
}

impl Ket {
    /// Builds a ket from arbitrary components, merging duplicates and
    /// dropping zeros. The result must have unit norm.
    pub fn new(mut components: Vec<(WordId, f64)>) -> Result<Self> {
        components.sort_by_key(|&(w, _)| w);
        let mut merged: Vec<(WordId, f64)> = Vec::with_capacity(components.len());
        for (w, a) in components {
            match merged.last_mut() {
                Some((last, acc)) if *last == w => *acc += a,
                _ => merged.push((w, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        let ket = Ket { components: merged };
        let norm = ket.norm();
        if (norm - 1.0).abs() > tol::UNIT {
            return Err(Error::Invariant(format!("ket norm {norm} is not 1")));
        }
        Ok(ket)
    }

    /// Normalizes a nonzero vector to unit length.
    pub fn normalized(components: Vec<(WordId, f64)>) -> Result<Self> {
        let norm = components.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Argument("cannot normalize a zero vector".into()));
        }
        Self::new(components.into_iter().map(|(w, a)| (w, a / norm)).collect())
    }

    pub fn basis(word: WordId) -> Self {
        Ket {
            components: vec![(word, 1.0)],
        }
    }

    pub fn components(&self) -> &[(WordId, f64)] {
        &self.components
    }

    pub fn amplitude(&self, word: WordId) -> f64 {
        self.components
            .binary_search_by_key(&word, |&(w, _)| w)
            .map_or(0.0, |i| self.components[i].1)
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|(_, a)| a * a).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Elementary,
    Superposition,
}

/// A projector |u⟩⟨u| together with how often it was observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub ket: Ket,
    pub weight: f64,
}

impl Event {
    pub fn elementary(word: WordId, weight: f64) -> Self {
        Event {
            kind: EventKind::Elementary,
            ket: Ket::basis(word),
            weight,
        }
    }

    /// |κ⟩ = Σ σᵢ |e_wᵢ⟩ from the squared weights σᵢ², which must be positive
    /// and sum to one.
    pub fn superposition(words: &[WordId], sigma_sq: &[f64], weight: f64) -> Result<Self> {
        if words.len() != sigma_sq.len() || words.len() < 2 {
            return Err(Error::Argument(
                "a superposition needs at least two words with one weight each".into(),
            ));
        }
        if sigma_sq.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Argument("superposition weights must be positive".into()));
        }
        let mut sorted = words.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != words.len() {
            return Err(Error::Argument("superposition words must be distinct".into()));
        }
        let ket = Ket::new(
            words
                .iter()
                .zip(sigma_sq)
                .map(|(&w, &s)| (w, s.sqrt()))
                .collect(),
        )?;
        Ok(Event {
            kind: EventKind::Superposition,
            ket,
            weight,
        })
    }
}
