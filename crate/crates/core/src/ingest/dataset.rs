use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub value: f64,
}

/// Observed ratings over a fixed user and item index space.
///
/// Users and items that never rate or get rated are still part of the index
/// space; they matter to the attribute couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingDataset {
    user_ids: Vec<String>,
    item_ids: Vec<String>,
    entries: Vec<Rating>,
    scale_min: f64,
    scale_max: f64,
    global_mean: f64,
}

impl RatingDataset {
    pub fn new(
        user_ids: Vec<String>,
        item_ids: Vec<String>,
        entries: Vec<Rating>,
        scale: (f64, f64),
    ) -> Result<Self> {
        let (scale_min, scale_max) = scale;
        if !(scale_min < scale_max) {
            return Err(Error::Config(format!(
                "rating scale [{scale_min}, {scale_max}] is empty"
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        for r in &entries {
            if r.user >= user_ids.len() {
                return Err(Error::IndexOutOfRange {
                    what: "user",
                    index: r.user,
                    len: user_ids.len(),
                });
            }
            if r.item >= item_ids.len() {
                return Err(Error::IndexOutOfRange {
                    what: "item",
                    index: r.item,
                    len: item_ids.len(),
                });
            }
            if !(scale_min..=scale_max).contains(&r.value) {
                return Err(Error::Domain(format!(
                    "rating {} outside scale [{scale_min}, {scale_max}]",
                    r.value
                )));
            }
            if !seen.insert((r.user, r.item)) {
                return Err(Error::Domain(format!(
                    "duplicate rating for user {} item {}",
                    r.user, r.item
                )));
            }
        }
        let global_mean = mean_of(&entries);
        Ok(RatingDataset {
            user_ids,
            item_ids,
            entries,
            scale_min,
            scale_max,
            global_mean,
        })
    }

    /// Dataset whose external ids are the decimal indices themselves.
    pub fn from_indexed(
        n_users: usize,
        n_items: usize,
        entries: Vec<Rating>,
        scale: (f64, f64),
    ) -> Result<Self> {
        let ids = |n: usize| (0..n).map(|i| i.to_string()).collect();
        Self::new(ids(n_users), ids(n_items), entries, scale)
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rating] {
        &self.entries
    }

    pub fn user_ids(&self) -> &[String] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn scale(&self) -> (f64, f64) {
        (self.scale_min, self.scale_max)
    }

    /// Mean of all observed ratings; 0 for an empty dataset.
    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.scale_min, self.scale_max)
    }

    /// Same index space, restricted to the given entries (in the given order).
    pub fn subset(&self, entry_ids: &[usize]) -> RatingDataset {
        let entries: Vec<Rating> = entry_ids.iter().map(|&e| self.entries[e]).collect();
        RatingDataset {
            user_ids: self.user_ids.clone(),
            item_ids: self.item_ids.clone(),
            global_mean: mean_of(&entries),
            entries,
            scale_min: self.scale_min,
            scale_max: self.scale_max,
        }
    }

    /// Same structure with rating values replaced entry by entry.
    pub fn with_values(&self, values: &[f64]) -> Result<RatingDataset> {
        if values.len() != self.entries.len() {
            return Err(Error::Argument(format!(
                "{} values for {} entries",
                values.len(),
                self.entries.len()
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(values)
            .map(|(r, &value)| Rating { value, ..*r })
            .collect();
        RatingDataset::new(
            self.user_ids.clone(),
            self.item_ids.clone(),
            entries,
            self.scale(),
        )
    }

    /// Entry indices grouped by user, each group in entry order.
    pub fn by_user(&self) -> EntityIndex {
        EntityIndex::build(self.n_users(), self.entries.iter().map(|r| r.user))
    }

    /// Entry indices grouped by item, each group in entry order.
    pub fn by_item(&self) -> EntityIndex {
        EntityIndex::build(self.n_items(), self.entries.iter().map(|r| r.item))
    }

    /// Rating lookup keyed by (user, item).
    pub fn lookup(&self) -> HashMap<(usize, usize), f64> {
        self.entries
            .iter()
            .map(|r| ((r.user, r.item), r.value))
            .collect()
    }
}

fn mean_of(entries: &[Rating]) -> f64 {
    if entries.is_empty() {
        0.0
    } else {
        entries.iter().map(|r| r.value).sum::<f64>() / entries.len() as f64
    }
}

/// Compressed row layout: for each entity, the indices of its rating entries.
#[derive(Debug, Clone)]
pub struct EntityIndex {
    offsets: Vec<usize>,
    entry_ids: Vec<usize>,
}

impl EntityIndex {
    fn build(n: usize, keys: impl Iterator<Item = usize> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for k in keys.clone() {
            offsets[k + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut entry_ids = vec![0usize; offsets[n]];
        for (e, k) in keys.enumerate() {
            entry_ids[cursor[k]] = e;
            cursor[k] += 1;
        }
        EntityIndex { offsets, entry_ids }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entry_ids[self.offsets[i]..self.offsets[i + 1]]
    }
}
