use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::RatingDataset;
use crate::error::{Error, Result};

/// Assignment of every rating entry to one of `n_folds` test folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub n_folds: usize,
    pub fold_of: Vec<usize>,
    pub seed: u64,
}

/// Seeded shuffle of the entry order, then round-robin fold assignment, so
/// fold sizes differ by at most one.
pub fn kfold_split(ds: &RatingDataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    FoldAssignment::new(ds.len(), k, seed)
}

impl FoldAssignment {
    pub fn new(n_entries: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {k}")));
        }
        if n_entries == 0 {
            return Err(Error::Config("cannot split an empty dataset".into()));
        }
        if k > n_entries {
            return Err(Error::Config(format!(
                "{k} folds requested for {n_entries} entries"
            )));
        }
        let mut order: Vec<usize> = (0..n_entries).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut fold_of = vec![0; n_entries];
        for (pos, &e) in order.iter().enumerate() {
            fold_of[e] = pos % k;
        }
        Ok(FoldAssignment {
            n_folds: k,
            fold_of,
            seed,
        })
    }

    pub fn test_entries(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&e| self.fold_of[e] == fold)
            .collect()
    }

    pub fn train_entries(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&e| self.fold_of[e] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// FNV-1a over the assignment; equal signatures mean (almost surely)
    /// equal assignments.
    pub fn signature(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(self.n_folds as u64);
        for &f in &self.fold_of {
            feed(f as u64);
        }
        h
    }
}
