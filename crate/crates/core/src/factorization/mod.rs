//! Latent factor models with coupling regularizers.
//!
//! All MF-family methods share one objective:
//!
//! ```text
//! L = 1/2 Σ_(u,i)∈K (R_ui - r_m - P_u·Q_i)²
//!   + λ/2 (‖P‖² + ‖Q‖²)
//!   + α/2 Σ_u ‖P_u - Σ_{v∈N(u)} w_uv P_v‖²
//!   + β/2 Σ_i ‖Q_i - Σ_{j∈N(i)} w_ij Q_j‖²
//! ```
//!
//! The variants differ only in which neighbor graphs feed `w` (coupled,
//! one-hot Pearson/cosine/Jaccard, or rating Pearson) and, for RSVD, in
//! dropping the offset `r_m`.
//!
//! Coupling sums run over entities with a non-empty neighborhood only; an
//! entity without neighbors is not pulled toward anything.

mod config;
mod model;
mod objective;
pub mod plain;
mod train;

pub use config::{TrainConfig, Variant};
pub use model::FactorModel;
pub use objective::{gradients, objective_value, Objective};
pub use train::{initial_model, train, EpochRecord, TrainTrace};
