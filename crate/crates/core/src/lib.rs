//! Keyword search over heterogeneous data with quantum-probability ranking.
//!
//! Records from relational tables, JSON collections and property graphs are
//! joined and flattened into text statements. Each statement is modelled as
//! a density matrix over its words, estimated from single-word events and
//! co-located word compounds, and stored in truncated eigen form. A keyword
//! query is scored against each candidate statement by rotating its events
//! into the statement's eigenbasis and comparing densities.

pub mod colocation;
pub mod config;
pub mod eval;
pub mod error;
pub mod ids;
pub mod index;
pub mod ingest;
pub(crate) mod numfmt;
pub mod quantum;
pub mod query;
pub mod statements;
pub mod synthetic;
pub mod text;

pub use config::{CandidateMode, Config, WeightMode};
pub use error::{Error, Result};
pub use ids::{StatementId, WordId};
