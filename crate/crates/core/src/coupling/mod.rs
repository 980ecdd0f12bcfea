//! Entity similarities and the top-K neighbor graphs built from them.

mod coupled;
mod graph;
mod onehot;
mod rating;

use std::fmt;
use std::str::FromStr;

pub use coupled::{coupled_similarity, inter_attribute_similarity, intra_attribute_similarity, CouplingModel};
pub use graph::{
    attribute_neighbor_graph, build_neighbor_graph, rating_neighbor_graph, GraphOptions, NeighborGraph,
};
pub use onehot::{simple_attribute_similarity, OneHot};
pub use rating::{rating_similarity, Axis, RatingProfiles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityKind {
    /// Intra- times inter-coupled value similarity, summed over attributes.
    Coupled,
    /// Pearson correlation of one-hot attribute vectors.
    Pearson,
    /// Cosine of one-hot attribute vectors.
    Cosine,
    /// Jaccard index of active one-hot positions.
    Jaccard,
    /// Pearson correlation over co-rated entries of the rating matrix.
    RatingPearson,
}

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 5] = [
        SimilarityKind::Coupled,
        SimilarityKind::Pearson,
        SimilarityKind::Cosine,
        SimilarityKind::Jaccard,
        SimilarityKind::RatingPearson,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityKind::Coupled => "coupled",
            SimilarityKind::Pearson => "pearson",
            SimilarityKind::Cosine => "cosine",
            SimilarityKind::Jaccard => "jaccard",
            SimilarityKind::RatingPearson => "rating-pearson",
        }
    }

    /// True for kinds computed from attribute tables alone.
    pub fn is_attribute_based(self) -> bool {
        !matches!(self, SimilarityKind::RatingPearson)
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimilarityKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SimilarityKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::Error::Config(format!("unknown similarity kind {s:?}")))
    }
}
