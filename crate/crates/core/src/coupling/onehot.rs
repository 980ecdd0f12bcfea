use super::SimilarityKind;
use crate::error::{Error, Result};
use crate::ingest::AttributeTable;

/// One-hot view of an attribute table: every entity is a 0/1 vector over the
/// concatenated vocabularies, with exactly one active position per attribute.
///
/// Because every row has the same number of active positions, the cosine,
/// Jaccard and Pearson measures depend only on how many attribute values two
/// rows share.
#[derive(Debug, Clone, Copy)]
pub struct OneHot {
    /// Number of attributes (active positions per row).
    active: usize,
    /// Total vector length, the sum of vocabulary sizes.
    width: usize,
}

impl OneHot {
    pub fn new(table: &AttributeTable) -> Self {
        OneHot {
            active: table.n_attributes(),
            width: (0..table.n_attributes()).map(|a| table.vocab_size(a)).sum(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn similarity(&self, kind: SimilarityKind, a: &[u32], b: &[u32]) -> f64 {
        let shared = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
        let j = self.active as f64;
        let l = self.width as f64;
        if self.active == 0 {
            return 0.0;
        }
        match kind {
            SimilarityKind::Cosine => shared / j,
            SimilarityKind::Jaccard => shared / (2.0 * j - shared),
            SimilarityKind::Pearson => {
                if self.width == self.active {
                    // every vector is all ones
                    0.0
                } else {
                    (l * shared - j * j) / (l * j - j * j)
                }
            }
            SimilarityKind::Coupled | SimilarityKind::RatingPearson => {
                unreachable!("not a one-hot similarity: {kind}")
            }
        }
    }
}

/// Pearson, cosine or Jaccard similarity of two entities' one-hot rows.
pub fn simple_attribute_similarity(kind: SimilarityKind, table: &AttributeTable, i: usize, j: usize) -> Result<f64> {
    if !matches!(kind, SimilarityKind::Pearson | SimilarityKind::Cosine | SimilarityKind::Jaccard) {
        return Err(Error::Argument(format!("{kind} is not a one-hot attribute similarity")));
    }
    for idx in [i, j] {
        if idx >= table.n_entities() {
            return Err(Error::IndexOutOfRange {
                what: "entity",
                index: idx,
                len: table.n_entities(),
            });
        }
    }
    Ok(OneHot::new(table).similarity(kind, table.row(i), table.row(j)))
}
