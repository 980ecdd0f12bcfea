//! Small synthetic datasets with a known low-rank structure.
//!
//! Users and items fall into clusters. Each cluster has a latent center;
//! entities sit near their cluster's center and carry categorical attributes
//! that mostly reveal the cluster. Observed ratings are the rounded low-rank
//! reconstruction plus Gaussian noise. Attribute names follow the MovieLens
//! layout so a generated set can be written out with
//! [`crate::ingest::write_movielens`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{AttributeTable, AttributeTableBuilder, Rating, RatingDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub rank: usize,
    pub n_clusters: usize,
    /// Probability that a (user, item) cell is observed.
    pub density: f64,
    /// Standard deviation of the rating noise.
    pub noise: f64,
    /// Spread of entity factors around their cluster center.
    pub jitter: f64,
    /// Probability that an attribute value is drawn at random instead of
    /// from the entity's cluster.
    pub attribute_noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_users: 20,
            n_items: 20,
            rank: 2,
            n_clusters: 3,
            density: 0.5,
            noise: 0.3,
            jitter: 0.1,
            attribute_noise: 0.1,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub ratings: RatingDataset,
    pub users: AttributeTable,
    pub items: AttributeTable,
    /// Ground-truth factors, row-major `n x rank`.
    pub user_factors: Vec<f64>,
    pub item_factors: Vec<f64>,
    pub user_clusters: Vec<usize>,
    pub item_clusters: Vec<usize>,
}

impl Synthetic {
    /// Noise-free rating of a cell, clamped to `[1, 5]`.
    pub fn truth(&self, u: usize, i: usize) -> f64 {
        let r = self.user_factors.len() / self.ratings.n_users();
        signal(&self.user_factors[u * r..(u + 1) * r], &self.item_factors[i * r..(i + 1) * r]).clamp(1.0, 5.0)
    }
}

fn signal(p: &[f64], q: &[f64]) -> f64 {
    3.0 + p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn factors(rng: &mut ChaCha8Rng, n: usize, cfg: &SyntheticConfig, centers: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let r = cfg.rank;
    let mut out = Vec::with_capacity(n * r);
    let mut clusters = Vec::with_capacity(n);
    for e in 0..n {
        let c = e % cfg.n_clusters;
        clusters.push(c);
        for k in 0..r {
            out.push(centers[c * r + k] + cfg.jitter * gaussian(rng));
        }
    }
    (out, clusters)
}

fn pick<'a>(rng: &mut ChaCha8Rng, cfg: &SyntheticConfig, cluster: usize, labels: &[&'a str]) -> &'a str {
    if rng.gen::<f64>() < cfg.attribute_noise {
        labels[rng.gen_range(0..labels.len())]
    } else {
        labels[cluster % labels.len()]
    }
}

pub fn generate(cfg: &SyntheticConfig) -> Result<Synthetic> {
    if cfg.n_users == 0 || cfg.n_items == 0 || cfg.rank == 0 || cfg.n_clusters == 0 {
        return Err(Error::Config("synthetic sizes must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.density) || !(0.0..=1.0).contains(&cfg.attribute_noise) {
        return Err(Error::Config("density and attribute_noise must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = cfg.rank;
    let center = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..cfg.n_clusters * r).map(|_| rng.gen_range(-1.2..1.2)).collect()
    };
    let user_centers = center(&mut rng);
    let item_centers = center(&mut rng);
    let (user_factors, user_clusters) = factors(&mut rng, cfg.n_users, cfg, &user_centers);
    let (item_factors, item_clusters) = factors(&mut rng, cfg.n_items, cfg, &item_centers);

    const GENDERS: [&str; 2] = ["F", "M"];
    const AGES: [&str; 7] = ["1", "18", "25", "35", "45", "50", "56"];
    const OCCUPATIONS: [&str; 8] = ["0", "1", "2", "3", "4", "5", "6", "7"];
    const ZIPS: [&str; 6] = ["10001", "20002", "30003", "40004", "50005", "60006"];
    const GENRES: [&str; 6] = ["Action", "Comedy", "Drama", "Horror", "Romance", "Thriller"];

    let mut users = AttributeTableBuilder::new(crate::ingest::movielens::USER_ATTRIBUTES);
    for &c in &user_clusters {
        let row = [
            pick(&mut rng, cfg, c, &GENDERS),
            pick(&mut rng, cfg, c, &AGES),
            pick(&mut rng, cfg, c, &OCCUPATIONS),
            pick(&mut rng, cfg, c, &ZIPS),
        ];
        users.push_row(row.map(Some))?;
    }
    let mut items = AttributeTableBuilder::new(crate::ingest::movielens::ITEM_ATTRIBUTES);
    for &c in &item_clusters {
        items.push_row([Some(pick(&mut rng, cfg, c, &GENRES))])?;
    }

    let mut entries = Vec::new();
    for u in 0..cfg.n_users {
        for i in 0..cfg.n_items {
            if rng.gen::<f64>() >= cfg.density {
                continue;
            }
            let s = signal(&user_factors[u * r..(u + 1) * r], &item_factors[i * r..(i + 1) * r]);
            let value = (s + cfg.noise * gaussian(&mut rng)).round().clamp(1.0, 5.0);
            entries.push(Rating { user: u, item: i, value });
        }
    }
    let user_ids = (1..=cfg.n_users).map(|u| u.to_string()).collect();
    let item_ids = (1..=cfg.n_items).map(|i| i.to_string()).collect();
    let ratings = RatingDataset::new(user_ids, item_ids, entries, (1.0, 5.0))?;
    Ok(Synthetic {
        ratings,
        users: users.build(),
        items: items.build(),
        user_factors,
        item_factors,
        user_clusters,
        item_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_scale() {
        let a = generate(&SyntheticConfig::default()).unwrap();
        let b = generate(&SyntheticConfig::default()).unwrap();
        assert_eq!(a.ratings, b.ratings);
        assert_eq!(a.users, b.users);
        assert!(!a.ratings.is_empty());
        assert!(a.ratings.entries().iter().all(|r| (1.0..=5.0).contains(&r.value) && r.value.fract() == 0.0));
        assert_eq!(a.users.n_entities(), 20);
        assert_eq!(a.items.n_attributes(), 1);
    }

    #[test]
    fn attributes_follow_clusters_without_noise() {
        let cfg = SyntheticConfig { attribute_noise: 0.0, ..Default::default() };
        let s = generate(&cfg).unwrap();
        for u in 0..cfg.n_users {
            for v in 0..cfg.n_users {
                if s.user_clusters[u] == s.user_clusters[v] {
                    assert_eq!(s.users.row(u), s.users.row(v));
                }
            }
        }
    }

    #[test]
    fn bad_config() {
        assert!(generate(&SyntheticConfig { n_users: 0, ..Default::default() }).is_err());
        assert!(generate(&SyntheticConfig { density: 1.5, ..Default::default() }).is_err());
    }
}
