#![allow(dead_code)]

use cmf_core::factorization::{objective_value, FactorModel, TrainConfig, Variant};
use cmf_core::ingest::Rating;
use cmf_core::{NeighborGraph, RatingDataset, SimilarityKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random problem: ratings, both graphs and a model to evaluate at.
pub struct Instance {
    pub ds: RatingDataset,
    pub users: NeighborGraph,
    pub items: NeighborGraph,
    pub model: FactorModel,
    pub cfg: TrainConfig,
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, k: usize, normalize: bool) -> NeighborGraph {
    let lists = (0..n)
        .map(|u| {
            let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
            others.shuffle(rng);
            let mut list: Vec<(usize, f64)> = others.into_iter().take(k).map(|v| (v, rng.gen_range(0.05..1.0))).collect();
            if normalize {
                let s: f64 = list.iter().map(|p| p.1).sum();
                list.iter_mut().for_each(|p| p.1 /= s);
            }
            list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            list
        })
        .collect();
    NeighborGraph::from_lists(SimilarityKind::Coupled, normalize, lists).unwrap()
}

pub fn random_ratings(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> RatingDataset {
    let mut entries = Vec::new();
    for user in 0..n {
        for item in 0..m {
            if rng.gen::<f64>() < density {
                entries.push(Rating { user, item, value: rng.gen_range(1..=5) as f64 });
            }
        }
    }
    if entries.is_empty() {
        entries.push(Rating { user: 0, item: 0, value: 3.0 });
    }
    RatingDataset::from_indexed(n, m, entries, (1.0, 5.0)).unwrap()
}

pub fn instance(seed: u64, n: usize, m: usize, d: usize, k: usize, lambda: f64, alpha: f64, beta: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = random_ratings(&mut rng, n, m, 0.5);
    let normalize = rng.gen::<bool>();
    let users = random_graph(&mut rng, n, k.min(n - 1), normalize);
    let items = random_graph(&mut rng, m, k.min(m - 1), normalize);
    let p = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let q = (0..m * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let model = FactorModel::new(p, q, d, ds.global_mean(), ds.scale(), Variant::Cmf).unwrap();
    let cfg = TrainConfig { d, lambda, alpha, beta, variant: Variant::Cmf, ..Default::default() };
    Instance { ds, users, items, model, cfg }
}

/// The objective written out term by term over a dense rating grid.
pub fn naive_objective(inst: &Instance, p: &[f64], q: &[f64]) -> f64 {
    let d = inst.cfg.d;
    let n = inst.ds.n_users();
    let m = inst.ds.n_items();
    let r_m = inst.model.offset();
    let mut grid = vec![vec![None; m]; n];
    for r in inst.ds.entries() {
        grid[r.user][r.item] = Some(r.value);
    }
    let mut fit = 0.0;
    for u in 0..n {
        for i in 0..m {
            if let Some(r) = grid[u][i] {
                let mut pred = r_m;
                for k in 0..d {
                    pred += p[u * d + k] * q[i * d + k];
                }
                fit += (r - pred) * (r - pred);
            }
        }
    }
    let mut norms = 0.0;
    for x in p.iter().chain(q) {
        norms += x * x;
    }
    let coupling = |x: &[f64], g: &NeighborGraph, count: usize| {
        let mut total = 0.0;
        for a in 0..count {
            if g.neighbors(a).is_empty() {
                continue;
            }
            for k in 0..d {
                let mut diff = x[a * d + k];
                for &(b, w) in g.neighbors(a) {
                    diff -= w * x[b * d + k];
                }
                total += diff * diff;
            }
        }
        total
    };
    fit / 2.0
        + inst.cfg.lambda / 2.0 * norms
        + inst.cfg.alpha / 2.0 * coupling(p, &inst.users, n)
        + inst.cfg.beta / 2.0 * coupling(q, &inst.items, m)
}

/// Central differences of the library objective, step `h`.
pub fn finite_difference(inst: &Instance, h: f64) -> (Vec<f64>, Vec<f64>) {
    let eval = |p: Vec<f64>, q: Vec<f64>| {
        let d = inst.cfg.d;
        let model = FactorModel::new(p, q, d, inst.model.offset(), inst.ds.scale(), Variant::Cmf).unwrap();
        objective_value(&model, &inst.ds, Some(&inst.users), Some(&inst.items), &inst.cfg).unwrap()
    };
    let p0 = inst.model.p().to_vec();
    let q0 = inst.model.q().to_vec();
    let mut gp = vec![0.0; p0.len()];
    let mut gq = vec![0.0; q0.len()];
    for (idx, g) in gp.iter_mut().enumerate() {
        let (mut plus, mut minus) = (p0.clone(), p0.clone());
        plus[idx] += h;
        minus[idx] -= h;
        *g = (eval(plus, q0.clone()) - eval(minus, q0.clone())) / (2.0 * h);
    }
    for (idx, g) in gq.iter_mut().enumerate() {
        let (mut plus, mut minus) = (q0.clone(), q0.clone());
        plus[idx] += h;
        minus[idx] -= h;
        *g = (eval(p0.clone(), plus) - eval(p0.clone(), minus)) / (2.0 * h);
    }
    (gp, gq)
}

/// Largest `|a - b| / max(|a|, |b|)` over entries whose magnitude exceeds 1e-8.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .filter(|(a, b)| a.abs().max(b.abs()) > 1e-8)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
        .fold(0.0, f64::max)
}
