//! Raw dataset parsing, categorical attribute tables and fold assignment.

mod attributes;
pub mod bookcrossing;
mod dataset;
mod discretize;
mod folds;
pub mod interchange;
pub mod movielens;
mod text;

pub use attributes::{AttributeTable, AttributeTableBuilder, MISSING_ID};
pub use bookcrossing::parse_bookcrossing;
pub use dataset::{EntityIndex, Rating, RatingDataset};
pub use discretize::{bin_label, discretize_numeric};
pub use folds::{kfold_split, FoldAssignment};
pub use movielens::{parse_movielens, parse_movielens_with, write_movielens, MovieLensOptions};

/// A parsed dataset: ratings plus the two attribute tables, aligned by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub name: String,
    pub ratings: RatingDataset,
    pub users: AttributeTable,
    pub items: AttributeTable,
    pub summary: IngestSummary,
}

/// Counters collected while parsing. Not part of the data itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestSummary {
    /// Rating rows in the source file, before any filtering.
    pub raw_rating_rows: usize,
    pub dropped_implicit: usize,
    pub dropped_unknown_item: usize,
    pub dropped_unknown_user: usize,
    /// Repeated (user, item) pairs; the last occurrence wins.
    pub duplicates: usize,
    pub notes: Vec<String>,
}

impl Ingested {
    pub fn summary_line(&self) -> String {
        format!(
            "{}: users={} items={} ratings={} (raw rows {}, implicit dropped {}, unknown item {}, unknown user {}, duplicates {})",
            self.name,
            self.ratings.n_users(),
            self.ratings.n_items(),
            self.ratings.len(),
            self.summary.raw_rating_rows,
            self.summary.dropped_implicit,
            self.summary.dropped_unknown_item,
            self.summary.dropped_unknown_user,
            self.summary.duplicates,
        )
    }
}
