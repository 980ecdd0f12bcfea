//! Memory-based baselines over rating-Pearson neighborhoods.
//!
//! Graphs passed here should carry raw weights (built with
//! `normalize = false`); the weighted means divide by `Σ |w|` themselves.

use crate::coupling::NeighborGraph;
use crate::error::{Error, Result};
use crate::ingest::RatingDataset;

/// Per-entity means and per-user rating rows of a training set.
#[derive(Debug, Clone)]
pub struct CfIndex {
    global_mean: f64,
    scale: (f64, f64),
    user_means: Vec<Option<f64>>,
    item_means: Vec<Option<f64>>,
    /// `(item, rating)` sorted by item.
    user_rows: Vec<Vec<(usize, f64)>>,
}

fn means(n: usize, keys: impl Iterator<Item = (usize, f64)>) -> Vec<Option<f64>> {
    let mut sum = vec![0.0; n];
    let mut count = vec![0usize; n];
    for (k, v) in keys {
        sum[k] += v;
        count[k] += 1;
    }
    sum.into_iter()
        .zip(count)
        .map(|(s, c)| (c > 0).then(|| s / c as f64))
        .collect()
}

impl CfIndex {
    pub fn new(ds: &RatingDataset) -> Self {
        let mut user_rows = vec![Vec::new(); ds.n_users()];
        for r in ds.entries() {
            user_rows[r.user].push((r.item, r.value));
        }
        for row in &mut user_rows {
            row.sort_by_key(|&(i, _)| i);
        }
        CfIndex {
            global_mean: ds.global_mean(),
            scale: ds.scale(),
            user_means: means(ds.n_users(), ds.entries().iter().map(|r| (r.user, r.value))),
            item_means: means(ds.n_items(), ds.entries().iter().map(|r| (r.item, r.value))),
            user_rows,
        }
    }

    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    pub fn user_mean(&self, u: usize) -> Option<f64> {
        self.user_means.get(u).copied().flatten()
    }

    pub fn item_mean(&self, i: usize) -> Option<f64> {
        self.item_means.get(i).copied().flatten()
    }

    pub fn rating(&self, u: usize, i: usize) -> Option<f64> {
        let row = self.user_rows.get(u)?;
        row.binary_search_by_key(&i, |&(j, _)| j).ok().map(|at| row[at].1)
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.scale.0, self.scale.1)
    }

    fn check(&self, u: usize, i: usize) -> Result<()> {
        if u >= self.user_means.len() {
            return Err(Error::IndexOutOfRange { what: "user", index: u, len: self.user_means.len() });
        }
        if i >= self.item_means.len() {
            return Err(Error::IndexOutOfRange { what: "item", index: i, len: self.item_means.len() });
        }
        Ok(())
    }

    /// User-based CF: `mean(u) + Σ w_uv (R_vi - mean(v)) / Σ |w_uv|` over
    /// neighbors `v` that rated `i`. Falls back to `mean(u)`, then the global
    /// mean. Clamped to the rating scale.
    pub fn predict_ubcf(&self, user_graph: &NeighborGraph, u: usize, i: usize) -> Result<f64> {
        self.check(u, i)?;
        let Some(base) = self.user_mean(u) else {
            return Ok(self.clamp(self.global_mean));
        };
        let (mut num, mut den) = (0.0, 0.0);
        for &(v, w) in user_graph.neighbors(u) {
            if let (Some(r), Some(mv)) = (self.rating(v, i), self.user_mean(v)) {
                num += w * (r - mv);
                den += w.abs();
            }
        }
        let pred = if den > 0.0 { base + num / den } else { base };
        Ok(self.clamp(pred))
    }

    /// Item-based CF: `Σ w_ij R_uj / Σ |w_ij|` over neighbors `j` rated by
    /// `u`. Falls back to the item mean, then the global mean. Clamped.
    pub fn predict_ibcf(&self, item_graph: &NeighborGraph, u: usize, i: usize) -> Result<f64> {
        self.check(u, i)?;
        let (mut num, mut den) = (0.0, 0.0);
        for &(j, w) in item_graph.neighbors(i) {
            if let Some(r) = self.rating(u, j) {
                num += w * r;
                den += w.abs();
            }
        }
        let pred = if den > 0.0 {
            num / den
        } else {
            self.item_mean(i).unwrap_or(self.global_mean)
        };
        Ok(self.clamp(pred))
    }
}

/// One-shot form of [`CfIndex::predict_ubcf`].
pub fn predict_ubcf(ds: &RatingDataset, user_graph: &NeighborGraph, u: usize, i: usize) -> Result<f64> {
    CfIndex::new(ds).predict_ubcf(user_graph, u, i)
}

/// One-shot form of [`CfIndex::predict_ibcf`].
pub fn predict_ibcf(ds: &RatingDataset, item_graph: &NeighborGraph, u: usize, i: usize) -> Result<f64> {
    CfIndex::new(ds).predict_ibcf(item_graph, u, i)
}
