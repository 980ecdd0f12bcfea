use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::objective::Objective;
use super::{FactorModel, TrainConfig};
use crate::coupling::NeighborGraph;
use crate::error::{Error, Result};
use crate::ingest::RatingDataset;
use crate::parallel::Stopwatch;

/// Step sizes below this count as a stalled or diverged run.
pub(crate) const MIN_LEARNING_RATE: f64 = 1e-12;

/// Half-width of the uniform initialization interval.
pub(crate) const INIT_SCALE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// Objective after the accepted update.
    pub objective: f64,
    /// Norm of the gradient the update was taken along.
    pub grad_norm: f64,
    /// Step size of the accepted update.
    pub learning_rate: f64,
    /// Seconds since training started.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub initial_objective: f64,
    pub epochs: Vec<EpochRecord>,
    pub converged: bool,
}

impl TrainTrace {
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.epochs.iter().map(|e| e.objective)
    }

    /// Initial objective followed by one value per epoch never increases.
    pub fn is_non_increasing(&self) -> bool {
        let mut prev = self.initial_objective;
        self.objectives().all(|l| {
            let ok = l <= prev;
            prev = l;
            ok
        })
    }

    pub fn final_objective(&self) -> f64 {
        self.epochs.last().map_or(self.initial_objective, |e| e.objective)
    }
}

/// Model with factors drawn uniformly from `[-0.05, 0.05]`: `P` row by row,
/// then `Q`, from a ChaCha8 stream seeded with `cfg.seed`.
pub fn initial_model(ds: &RatingDataset, cfg: &TrainConfig) -> FactorModel {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n * cfg.d).map(|_| rng.gen_range(-INIT_SCALE..=INIT_SCALE)).collect()
    };
    let p = draw(ds.n_users());
    let q = draw(ds.n_items());
    let offset = if cfg.variant.uses_offset() { ds.global_mean() } else { 0.0 };
    FactorModel {
        n_users: ds.n_users(),
        n_items: ds.n_items(),
        d: cfg.d,
        p,
        q,
        offset,
        scale: ds.scale(),
        variant: cfg.variant,
        config: cfg.echo(),
    }
}

fn check_graphs(
    cfg: &TrainConfig,
    user_graph: Option<&NeighborGraph>,
    item_graph: Option<&NeighborGraph>,
) -> Result<()> {
    let Some(kind) = cfg.variant.similarity() else {
        return Ok(());
    };
    for (side, graph) in [("user", user_graph), ("item", item_graph)] {
        if let Some(g) = graph {
            if g.kind() != kind {
                return Err(Error::Config(format!(
                    "{} needs {kind} {side} neighborhoods, got {}",
                    cfg.variant,
                    g.kind()
                )));
            }
        }
    }
    Ok(())
}

/// Full-batch gradient descent on the shared objective.
///
/// Each epoch steps `P -= η dL/dP`, `Q -= η dL/dQ`. A step that raises the
/// objective (or makes it non-finite) is retried with `η / 2`; the reduced
/// step size carries over to later epochs. Training stops when the relative
/// change `|L_t - L_{t-1}| / max(L_{t-1}, 1)` falls below the tolerance, when
/// no step above 1e-12 decreases the objective, or after `max_epochs`.
///
/// Graph-free variants ignore any graphs passed in.
pub fn train(
    ds: &RatingDataset,
    user_graph: Option<&NeighborGraph>,
    item_graph: Option<&NeighborGraph>,
    cfg: &TrainConfig,
) -> Result<(FactorModel, TrainTrace)> {
    cfg.validate()?;
    check_graphs(cfg, user_graph, item_graph)?;
    let objective = Objective::new(ds, user_graph, item_graph, cfg)?;
    let clock = Stopwatch::start();

    let mut model = initial_model(ds, cfg);
    let mut current = objective.value_unchecked(&model);
    let mut trace = TrainTrace {
        initial_objective: current,
        ..Default::default()
    };
    if !current.is_finite() {
        return Err(Error::TrainingFailed {
            fold: None,
            message: "initial objective is not finite".into(),
            trace: Box::new(trace),
        });
    }

    let mut eta = cfg.learning_rate;
    let mut candidate = model.clone();
    'epochs: for _ in 0..cfg.max_epochs {
        let (gp, gq) = objective.gradient_unchecked(&model);
        let grad_norm = gp.iter().chain(&gq).map(|g| g * g).sum::<f64>().sqrt();
        let next = loop {
            for (c, (x, g)) in candidate.p.iter_mut().zip(model.p.iter().zip(&gp)) {
                *c = x - eta * g;
            }
            for (c, (x, g)) in candidate.q.iter_mut().zip(model.q.iter().zip(&gq)) {
                *c = x - eta * g;
            }
            let value = objective.value_unchecked(&candidate);
            if value.is_finite() && value <= current {
                break value;
            }
            eta *= 0.5;
            if eta < MIN_LEARNING_RATE {
                if value.is_finite() {
                    // no descent direction left at representable step sizes
                    trace.converged = true;
                    break 'epochs;
                }
                return Err(Error::TrainingFailed {
                    fold: None,
                    message: format!("objective diverged with step size below {MIN_LEARNING_RATE}"),
                    trace: Box::new(trace),
                });
            }
        };
        std::mem::swap(&mut model, &mut candidate);
        if !model.is_finite() {
            return Err(Error::TrainingFailed {
                fold: None,
                message: "non-finite factors after update".into(),
                trace: Box::new(trace),
            });
        }
        trace.epochs.push(EpochRecord {
            objective: next,
            grad_norm,
            learning_rate: eta,
            seconds: clock.seconds(),
        });
        let change = (current - next).abs() / current.max(1.0);
        current = next;
        if change < cfg.convergence_tol {
            trace.converged = true;
            break;
        }
    }
    Ok((model, trace))
}
