use crate::ingest::RatingDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    User,
    Item,
}

/// Ratings of each entity along one axis, as `(other index, rating)` sorted by
/// the other index.
#[derive(Debug, Clone)]
pub struct RatingProfiles {
    profiles: Vec<Vec<(usize, f64)>>,
}

impl RatingProfiles {
    pub fn new(ds: &RatingDataset, axis: Axis) -> Self {
        let n = match axis {
            Axis::User => ds.n_users(),
            Axis::Item => ds.n_items(),
        };
        let mut profiles = vec![Vec::new(); n];
        for r in ds.entries() {
            match axis {
                Axis::User => profiles[r.user].push((r.item, r.value)),
                Axis::Item => profiles[r.item].push((r.user, r.value)),
            }
        }
        for p in profiles.iter_mut() {
            p.sort_unstable_by_key(|e| e.0);
        }
        RatingProfiles { profiles }
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profile(&self, i: usize) -> &[(usize, f64)] {
        &self.profiles[i]
    }

    /// Pearson correlation over co-rated entries, computed around the
    /// co-rated means. Fewer than two co-rated entries or a constant side
    /// gives 0.
    pub fn pearson(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.profiles[i], &self.profiles[j]);
        let mut pairs = Vec::new();
        let (mut p, mut q) = (0, 0);
        while p < a.len() && q < b.len() {
            match a[p].0.cmp(&b[q].0) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    pairs.push((a[p].1, b[q].1));
                    p += 1;
                    q += 1;
                }
            }
        }
        if pairs.len() < 2 {
            return 0.0;
        }
        let n = pairs.len() as f64;
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for &(x, y) in &pairs {
            cov += (x - mx) * (y - my);
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
        }
        if vx <= 0.0 || vy <= 0.0 {
            return 0.0;
        }
        (cov / (vx * vy).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Pearson correlation of two users (or two items) over co-rated entries.
pub fn rating_similarity(ds: &RatingDataset, axis: Axis, i: usize, j: usize) -> f64 {
    RatingProfiles::new(ds, axis).pearson(i, j)
}
