//! Coupled matrix factorization for rating prediction.
//!
//! Users and items carry categorical attributes. Couplings between attribute
//! values (how often a value occurs, and how its co-occurrence profile on the
//! other attributes overlaps with another value's) give an entity similarity
//! that regularizes a latent factor model toward each entity's neighborhood.
//!
//! The crate is organized as a pipeline:
//!
//! * [`ingest`] parses MovieLens-1M and BookCrossing dumps into a
//!   [`RatingDataset`] plus two [`AttributeTable`]s, and splits ratings into folds.
//! * [`coupling`] computes coupled, one-hot and rating-based similarities and
//!   the top-K [`NeighborGraph`]s built from them.
//! * [`factorization`] holds the regularized objective, its analytic gradient
//!   and the full-batch trainer shared by CMF and the MF-family baselines.
//! * [`neighborhood`] implements the user- and item-based CF baselines.
//! * [`evaluation`] runs k-fold experiments and renders comparison tables.

pub mod coupling;
pub mod error;
pub mod evaluation;
pub mod factorization;
mod fmt;
mod parallel;
pub mod ingest;
pub mod neighborhood;
pub mod synthetic;
pub mod toy;

pub use coupling::{CouplingModel, NeighborGraph, SimilarityKind};
pub use error::{Error, Result};
pub use evaluation::{EvalReport, Method};
pub use factorization::{FactorModel, TrainConfig, TrainTrace, Variant};
pub use fmt::format_significant;
pub use ingest::{AttributeTable, FoldAssignment, RatingDataset};
