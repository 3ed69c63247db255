//! Topological summaries of time series: delay embedding, Vietoris–Rips
//! filtrations, persistent homology in degrees 0 and 1, barcodes and
//! persistence landscapes.
//!
//! Raw (unstandardised) values are embedded; normalising first would
//! rescale the filtration axis per series and break cross-series
//! comparability of the landscapes.

mod cohomology;
mod embedding;
mod features;
mod homology;
mod landscape;
mod rips;

pub use cohomology::rips_persistence;
pub use embedding::{delay_embed, delay_embed_values, PointCloud};
pub use features::{
    compute_diagrams, feature_matrix, feature_matrix_from_diagrams, RadiusRule, SeriesDiagrams,
    TdaFeatureMatrix, TdaParams, TdaStrategy,
};
pub use homology::{barcode, persistent_homology, Bar, PersistenceDiagram};
pub use landscape::{landscape, PersistenceLandscape};
pub use rips::{enclosing_radius, rips_filtration, Filtration, Simplex};
