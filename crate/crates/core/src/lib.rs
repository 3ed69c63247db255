//! Symbolic (SAX / eSAX) and topological (persistent homology, persistence
//! landscapes) clustering of weekly search-interest time series, together
//! with the exploratory statistics and internal clustering scores used to
//! compare the two families of representations.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] ingests Google Trends `multiTimeline` exports and the
//!   canonical dataset CSV, aligns multiple exports and synthesises fixtures.
//! * [`eda`] holds Z-normalisation, rolling statistics, summaries,
//!   correlations and the KS / ADF tests.
//! * [`symbolic`] turns sliding windows into SAX or eSAX words and encodes
//!   them as numeric feature vectors.
//! * [`topology`] builds delay embeddings, Vietoris–Rips filtrations,
//!   persistence diagrams and landscapes.
//! * [`clustering`] runs k-means and Ward clustering and scores the result.

pub mod clustering;
pub mod dataset;
pub mod eda;
mod error;
pub mod symbolic;
pub mod topology;

pub use error::{Error, Result};
