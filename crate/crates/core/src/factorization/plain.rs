//! Regularized MF written directly against the rating list, without the
//! neighborhood machinery. Given the same configuration it takes exactly the
//! steps [`super::train`] takes when both coupling weights are zero, which
//! makes it a reference for that reduction.

use super::model::dot;
use super::train::{initial_model, EpochRecord, TrainTrace, MIN_LEARNING_RATE};
use super::{FactorModel, TrainConfig};
use crate::error::{Error, Result};
use crate::ingest::RatingDataset;

fn loss(ds: &RatingDataset, m: &FactorModel, lambda: f64) -> f64 {
    let d = m.d;
    let mut fit = 0.0;
    for r in ds.entries() {
        let e = m.offset + dot(&m.p[r.user * d..(r.user + 1) * d], &m.q[r.item * d..(r.item + 1) * d]) - r.value;
        fit += e * e;
    }
    let pp: f64 = m.p.iter().map(|x| x * x).sum();
    let qq: f64 = m.q.iter().map(|x| x * x).sum();
    0.5 * fit + 0.5 * lambda * (pp + qq)
}

fn grad(ds: &RatingDataset, m: &FactorModel, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let d = m.d;
    let mut gp: Vec<f64> = m.p.iter().map(|x| lambda * x).collect();
    let mut gq: Vec<f64> = m.q.iter().map(|x| lambda * x).collect();
    for r in ds.entries() {
        let (u, i) = (r.user, r.item);
        let e = m.offset + dot(&m.p[u * d..(u + 1) * d], &m.q[i * d..(i + 1) * d]) - r.value;
        for k in 0..d {
            gp[u * d + k] += e * m.q[i * d + k];
            gq[i * d + k] += e * m.p[u * d + k];
        }
    }
    (gp, gq)
}

/// Trains `r_m + P Q^T` with Frobenius regularization only; coupling weights
/// in `cfg` are ignored.
pub fn train_regularized_mf(ds: &RatingDataset, cfg: &TrainConfig) -> Result<(FactorModel, TrainTrace)> {
    cfg.validate()?;
    let mut model = initial_model(ds, cfg);
    let mut current = loss(ds, &model, cfg.lambda);
    let mut trace = TrainTrace {
        initial_objective: current,
        ..Default::default()
    };
    let fail = |trace: TrainTrace, message: &str| Error::TrainingFailed {
        fold: None,
        message: message.to_string(),
        trace: Box::new(trace),
    };
    if !current.is_finite() {
        return Err(fail(trace, "initial objective is not finite"));
    }
    let mut eta = cfg.learning_rate;
    for _ in 0..cfg.max_epochs {
        let (gp, gq) = grad(ds, &model, cfg.lambda);
        let grad_norm = gp.iter().chain(&gq).map(|g| g * g).sum::<f64>().sqrt();
        let mut accepted = None;
        while accepted.is_none() {
            let mut next = model.clone();
            for (x, g) in next.p.iter_mut().zip(&gp) {
                *x -= eta * g;
            }
            for (x, g) in next.q.iter_mut().zip(&gq) {
                *x -= eta * g;
            }
            let value = loss(ds, &next, cfg.lambda);
            if value.is_finite() && value <= current {
                accepted = Some((next, value));
            } else {
                eta *= 0.5;
                if eta < MIN_LEARNING_RATE {
                    if value.is_finite() {
                        trace.converged = true;
                        return Ok((model, trace));
                    }
                    return Err(fail(trace, "objective diverged"));
                }
            }
        }
        let (next, value) = accepted.expect("loop exits with a step");
        model = next;
        if !model.is_finite() {
            return Err(fail(trace, "non-finite factors after update"));
        }
        trace.epochs.push(EpochRecord {
            objective: value,
            grad_norm,
            learning_rate: eta,
            seconds: 0.0,
        });
        let change = (current - value).abs() / current.max(1.0);
        current = value;
        if change < cfg.convergence_tol {
            trace.converged = true;
            break;
        }
    }
    Ok((model, trace))
}
