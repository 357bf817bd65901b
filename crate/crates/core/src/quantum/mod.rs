//! Real quantum-probability numerics over word spaces.
//!
//! Words are basis vectors; events are unit kets (single words, or weighted
//! superpositions for compounds); a statement is a density matrix estimated
//! by maximum likelihood from its events, stored in eigen form and truncated
//! to its principal components.

mod density;
mod divergence;
mod eigen;
mod event;
mod maxlik;
mod system;

pub use density::{trace_probability, vector_probability, DensityMatrix, DensityVector, ReducedEvent};
pub use divergence::{vnd_full, vnd_score};
pub use eigen::{eigendecompose, EigenSystem};
pub use event::{Event, EventKind, Ket};
pub use maxlik::{
    density_matrix_log_likelihood, density_vector_log_likelihood, maxlik_density_matrix,
    maxlik_density_matrix_traced, maxlik_density_vector, maxlik_density_vector_traced, MaxLikOptions,
    MaxLikTrace,
};
pub use system::{pca_truncate, reduce_event, DensitySystem, SparseVector};

pub use crate::ids::WordId;

/// Tolerances shared by the invariant checks.
pub mod tol {
    pub const SYMMETRY: f64 = 1e-12;
    pub const PSD: f64 = 1e-10;
    pub const TRACE: f64 = 1e-9;
    pub const UNIT: f64 = 1e-12;
    pub const SIMPLEX: f64 = 1e-9;
    /// Squared projection below which a rotated event is considered absent.
    pub const ABSENT: f64 = 1e-12;
}
