//! Semantic search over tabular text.
//!
//! The pipeline ingests a CSV file ([`corpus`]), trains skip-gram word
//! embeddings over its text cells ([`embeddings`]), indexes one mean vector
//! per cell in a forest of random-hyperplane trees ([`ann`]) and answers
//! free-text queries with ranked records ([`search`]). [`eval`] measures the
//! index against an exact linear scan.

pub mod ann;
mod binio;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
