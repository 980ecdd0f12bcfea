use super::model::dot;
use super::{FactorModel, TrainConfig};
use crate::coupling::NeighborGraph;
use crate::error::{Error, Result};
use crate::ingest::{EntityIndex, RatingDataset};
use crate::parallel::{for_each_row, map_range};

/// One neighborhood regularizer: weight plus forward and reverse adjacency.
#[derive(Debug)]
struct Coupling {
    weight: f64,
    forward: Vec<Vec<(usize, f64)>>,
    /// `reverse[v]` lists `(u, w_uv)` for every `u` with `v` in its list.
    reverse: Vec<Vec<(usize, f64)>>,
}

impl Coupling {
    fn new(weight: f64, graph: Option<&NeighborGraph>, n: usize, side: &str) -> Result<Option<Self>> {
        if weight == 0.0 {
            return Ok(None);
        }
        let graph = graph.ok_or_else(|| {
            Error::Config(format!("{side} coupling weight is {weight} but no {side} graph was given"))
        })?;
        if graph.n_entities() != n {
            return Err(Error::Argument(format!(
                "{side} graph has {} entities, dataset has {n}",
                graph.n_entities()
            )));
        }
        Ok(Some(Coupling {
            weight,
            forward: graph.lists().to_vec(),
            reverse: graph.reverse(),
        }))
    }

    /// `D_u = X_u - Σ_v w_uv X_v` for every row; zero where `u` has no
    /// neighbors, so such entities carry no coupling penalty.
    fn residuals(&self, x: &[f64], d: usize) -> Vec<f64> {
        let mut out = x.to_vec();
        for_each_row(&mut out, d, |u, row| {
            if self.forward[u].is_empty() {
                row.fill(0.0);
                return;
            }
            for &(v, w) in &self.forward[u] {
                let xv = &x[v * d..(v + 1) * d];
                for k in 0..d {
                    row[k] -= w * xv[k];
                }
            }
        });
        out
    }

    fn penalty(&self, x: &[f64], d: usize) -> f64 {
        self.residuals(x, d).iter().map(|r| r * r).sum()
    }

    /// Adds `weight · (D_u - Σ_{v: u∈N(v)} w_vu D_v)` to every gradient row.
    fn add_gradient(&self, x: &[f64], d: usize, grad: &mut [f64]) {
        let resid = self.residuals(x, d);
        let a = self.weight;
        for_each_row(grad, d, |u, g| {
            let du = &resid[u * d..(u + 1) * d];
            for k in 0..d {
                g[k] += a * du[k];
            }
            for &(v, w) in &self.reverse[u] {
                let dv = &resid[v * d..(v + 1) * d];
                for k in 0..d {
                    g[k] -= a * w * dv[k];
                }
            }
        });
    }
}

/// The training objective for one dataset and pair of neighbor graphs, with
/// the rating indices built once.
#[derive(Debug)]
pub struct Objective<'a> {
    ds: &'a RatingDataset,
    by_user: EntityIndex,
    by_item: EntityIndex,
    lambda: f64,
    users: Option<Coupling>,
    items: Option<Coupling>,
}

impl<'a> Objective<'a> {
    /// Coupling terms are active only where the effective weight is nonzero;
    /// an active term needs its graph.
    pub fn new(
        ds: &'a RatingDataset,
        user_graph: Option<&NeighborGraph>,
        item_graph: Option<&NeighborGraph>,
        cfg: &TrainConfig,
    ) -> Result<Self> {
        Ok(Objective {
            ds,
            by_user: ds.by_user(),
            by_item: ds.by_item(),
            lambda: cfg.lambda,
            users: Coupling::new(cfg.effective_alpha(), user_graph, ds.n_users(), "user")?,
            items: Coupling::new(cfg.effective_beta(), item_graph, ds.n_items(), "item")?,
        })
    }

    fn check_shape(&self, m: &FactorModel) -> Result<()> {
        if m.n_users != self.ds.n_users() || m.n_items != self.ds.n_items() {
            return Err(Error::Argument(format!(
                "model is {}x{} but dataset is {}x{}",
                m.n_users,
                m.n_items,
                self.ds.n_users(),
                self.ds.n_items()
            )));
        }
        Ok(())
    }

    /// Value of the objective; errors if any factor is non-finite.
    pub fn value(&self, m: &FactorModel) -> Result<f64> {
        self.check_shape(m)?;
        if !m.is_finite() {
            return Err(Error::Numeric("model has non-finite factors".into()));
        }
        Ok(self.value_unchecked(m))
    }

    pub(crate) fn value_unchecked(&self, m: &FactorModel) -> f64 {
        let d = m.d;
        let mut fit = 0.0;
        for r in self.ds.entries() {
            let e = m.offset + dot(&m.p[r.user * d..(r.user + 1) * d], &m.q[r.item * d..(r.item + 1) * d]) - r.value;
            fit += e * e;
        }
        let pp: f64 = m.p.iter().map(|x| x * x).sum();
        let qq: f64 = m.q.iter().map(|x| x * x).sum();
        let mut total = 0.5 * fit + 0.5 * self.lambda * (pp + qq);
        if let Some(c) = &self.users {
            total += 0.5 * c.weight * c.penalty(&m.p, d);
        }
        if let Some(c) = &self.items {
            total += 0.5 * c.weight * c.penalty(&m.q, d);
        }
        total
    }

    /// Full-batch gradient `(dL/dP, dL/dQ)`, row-major like the factors.
    pub fn gradient(&self, m: &FactorModel) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_shape(m)?;
        if !m.is_finite() {
            return Err(Error::Numeric("model has non-finite factors".into()));
        }
        Ok(self.gradient_unchecked(m))
    }

    pub(crate) fn gradient_unchecked(&self, m: &FactorModel) -> (Vec<f64>, Vec<f64>) {
        let d = m.d;
        let entries = self.ds.entries();
        let resid: Vec<f64> = map_range(entries.len(), |e| {
            let r = entries[e];
            m.offset + dot(&m.p[r.user * d..(r.user + 1) * d], &m.q[r.item * d..(r.item + 1) * d]) - r.value
        });

        let lambda = self.lambda;
        let mut gp: Vec<f64> = m.p.iter().map(|x| lambda * x).collect();
        for_each_row(&mut gp, d, |u, g| {
            for &e in self.by_user.row(u) {
                let i = entries[e].item;
                let qi = &m.q[i * d..(i + 1) * d];
                for k in 0..d {
                    g[k] += resid[e] * qi[k];
                }
            }
        });
        let mut gq: Vec<f64> = m.q.iter().map(|x| lambda * x).collect();
        for_each_row(&mut gq, d, |i, g| {
            for &e in self.by_item.row(i) {
                let u = entries[e].user;
                let pu = &m.p[u * d..(u + 1) * d];
                for k in 0..d {
                    g[k] += resid[e] * pu[k];
                }
            }
        });

        if let Some(c) = &self.users {
            c.add_gradient(&m.p, d, &mut gp);
        }
        if let Some(c) = &self.items {
            c.add_gradient(&m.q, d, &mut gq);
        }
        (gp, gq)
    }
}

/// Objective value of `model` on `ds` under `cfg` (see the module docs).
pub fn objective_value(
    model: &FactorModel,
    ds: &RatingDataset,
    user_graph: Option<&NeighborGraph>,
    item_graph: Option<&NeighborGraph>,
    cfg: &TrainConfig,
) -> Result<f64> {
    Objective::new(ds, user_graph, item_graph, cfg)?.value(model)
}

/// Analytic gradient of [`objective_value`] with respect to `P` and `Q`.
pub fn gradients(
    model: &FactorModel,
    ds: &RatingDataset,
    user_graph: Option<&NeighborGraph>,
    item_graph: Option<&NeighborGraph>,
    cfg: &TrainConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Objective::new(ds, user_graph, item_graph, cfg)?.gradient(model)
}
