use super::report::{EvalReport, FoldMetrics};
use super::{mae, rmse, Method};
use crate::coupling::{attribute_neighbor_graph, rating_neighbor_graph, Axis, GraphOptions, NeighborGraph, SimilarityKind};
use crate::error::{Error, Result};
use crate::factorization::{train, TrainConfig, TrainTrace};
use crate::ingest::{AttributeTable, FoldAssignment, RatingDataset};
use crate::neighborhood::CfIndex;
use crate::parallel::map_range;

/// Settings shared by every method of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Trainer settings; the variant is overridden per method.
    pub train: TrainConfig,
    /// Neighborhood size for every graph.
    pub k: usize,
    /// Normalize the regularizer graphs. CF baselines always use raw weights.
    pub normalize: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train: TrainConfig::default(),
            k: 50,
            normalize: true,
        }
    }
}

impl ExperimentConfig {
    fn graph_options(&self) -> GraphOptions {
        GraphOptions { k: self.k, keep_nonpositive: false, normalize: self.normalize }
    }

    fn cf_options(&self) -> GraphOptions {
        GraphOptions { k: self.k, keep_nonpositive: false, normalize: false }
    }
}

/// Rating data plus the attribute tables of its users and items.
#[derive(Debug, Clone, Copy)]
pub struct StudyData<'a> {
    pub name: &'a str,
    pub ratings: &'a RatingDataset,
    pub users: &'a AttributeTable,
    pub items: &'a AttributeTable,
}

/// Fold-invariant attribute graphs, built once per study and reused.
#[derive(Debug, Clone, Default)]
pub struct GraphCache {
    graphs: Vec<((SimilarityKind, Axis), NeighborGraph)>,
}

impl GraphCache {
    /// Registers a graph built elsewhere, e.g. loaded from disk. Replaces any
    /// cached graph of the same kind and axis.
    pub fn insert(&mut self, axis: Axis, graph: NeighborGraph) {
        let key = (graph.kind(), axis);
        self.graphs.retain(|(k, _)| *k != key);
        self.graphs.push((key, graph));
    }

    pub fn get_or_build(&mut self, data: &StudyData<'_>, kind: SimilarityKind, axis: Axis, opts: &GraphOptions) -> Result<&NeighborGraph> {
        let at = match self.graphs.iter().position(|(key, _)| *key == (kind, axis)) {
            Some(at) => at,
            None => {
                let table = match axis {
                    Axis::User => data.users,
                    Axis::Item => data.items,
                };
                let graph = attribute_neighbor_graph(table, kind, opts)?;
                let (lo, hi, mean) = graph.length_stats();
                log::info!("{kind} {axis:?} graph: list lengths min {lo} max {hi} mean {mean:.2}");
                self.graphs.push(((kind, axis), graph));
                self.graphs.len() - 1
            }
        };
        Ok(&self.graphs[at].1)
    }
}

struct FoldOutcome {
    metrics: FoldMetrics,
    trace: Option<TrainTrace>,
}

fn with_fold(e: Error, fold: usize) -> Error {
    match e {
        Error::TrainingFailed { message, trace, .. } => Error::TrainingFailed { fold: Some(fold), message, trace },
        other => other,
    }
}

fn run_fold(
    data: &StudyData<'_>,
    method: Method,
    cfg: &ExperimentConfig,
    folds: &FoldAssignment,
    fold: usize,
    attribute_graphs: (Option<&NeighborGraph>, Option<&NeighborGraph>),
) -> Result<FoldOutcome> {
    let ds = data.ratings;
    let train_set = ds.subset(&folds.train_entries(fold));
    let test: Vec<_> = folds.test_entries(fold).into_iter().map(|e| ds.entries()[e]).collect();
    let truth: Vec<f64> = test.iter().map(|r| r.value).collect();

    let (pred, trace): (Vec<f64>, Option<TrainTrace>) = match method {
        Method::Mf(variant) => {
            let tc = TrainConfig { variant, ..cfg.train.clone() };
            let rating_graphs;
            let (ug, ig) = if variant.similarity() == Some(SimilarityKind::RatingPearson) {
                let opts = cfg.graph_options();
                let ug = (tc.effective_alpha() > 0.0).then(|| rating_neighbor_graph(&train_set, Axis::User, &opts)).transpose()?;
                let ig = (tc.effective_beta() > 0.0).then(|| rating_neighbor_graph(&train_set, Axis::Item, &opts)).transpose()?;
                rating_graphs = (ug, ig);
                (rating_graphs.0.as_ref(), rating_graphs.1.as_ref())
            } else {
                attribute_graphs
            };
            let (model, trace) = train(&train_set, ug, ig, &tc)?;
            if !trace.is_non_increasing() {
                return Err(Error::Numeric(format!("fold {fold}: training objective increased")));
            }
            let pred = test.iter().map(|r| model.predict(r.user, r.item, true)).collect::<Result<_>>()?;
            (pred, Some(trace))
        }
        Method::Ubcf => {
            let graph = rating_neighbor_graph(&train_set, Axis::User, &cfg.cf_options())?;
            let index = CfIndex::new(&train_set);
            let pred = test.iter().map(|r| index.predict_ubcf(&graph, r.user, r.item)).collect::<Result<_>>()?;
            (pred, None)
        }
        Method::Ibcf => {
            let graph = rating_neighbor_graph(&train_set, Axis::Item, &cfg.cf_options())?;
            let index = CfIndex::new(&train_set);
            let pred = test.iter().map(|r| index.predict_ibcf(&graph, r.user, r.item)).collect::<Result<_>>()?;
            (pred, None)
        }
        Method::GlobalMean => (vec![train_set.clamp(train_set.global_mean()); test.len()], None),
    };

    let metrics = FoldMetrics {
        fold,
        mae: mae(&pred, &truth)?,
        rmse: rmse(&pred, &truth)?,
        n_test: test.len(),
    };
    if metrics.mae > metrics.rmse * (1.0 + 1e-12) {
        return Err(Error::Numeric(format!("fold {fold}: MAE {} exceeds RMSE {}", metrics.mae, metrics.rmse)));
    }
    Ok(FoldOutcome { metrics, trace })
}

/// K-fold evaluation of one method: for every fold, fit on the other folds,
/// predict the held-out ratings (clamped) and score them.
///
/// Attribute graphs come from `cache` and are shared by all folds. Rating
/// graphs (ISMF, UBCF, IBCF) are rebuilt inside each fold from its training
/// ratings only. Folds run in parallel when the `parallel` feature is on.
pub fn run_cv_experiment_cached(
    data: &StudyData<'_>,
    method: Method,
    cfg: &ExperimentConfig,
    folds: &FoldAssignment,
    cache: &mut GraphCache,
) -> Result<EvalReport> {
    let ds = data.ratings;
    if folds.fold_of.len() != ds.len() {
        return Err(Error::Argument(format!(
            "fold assignment covers {} entries, dataset has {}",
            folds.fold_of.len(),
            ds.len()
        )));
    }
    cfg.train.validate()?;

    let mut attribute_graphs = (None, None);
    if let Some(variant) = method.variant() {
        let tc = TrainConfig { variant, ..cfg.train.clone() };
        if let Some(kind) = variant.similarity().filter(|k| k.is_attribute_based()) {
            let opts = cfg.graph_options();
            if tc.effective_alpha() > 0.0 {
                cache.get_or_build(data, kind, Axis::User, &opts)?;
            }
            if tc.effective_beta() > 0.0 {
                cache.get_or_build(data, kind, Axis::Item, &opts)?;
            }
            let find = |axis: Axis| cache.graphs.iter().find(|(key, _)| *key == (kind, axis)).map(|(_, g)| g);
            attribute_graphs = (
                find(Axis::User).filter(|_| tc.effective_alpha() > 0.0),
                find(Axis::Item).filter(|_| tc.effective_beta() > 0.0),
            );
        }
    }

    let outcomes = map_range(folds.n_folds, |f| run_fold(data, method, cfg, folds, f, attribute_graphs));
    let mut report = EvalReport {
        dataset: data.name.to_string(),
        method,
        d: method.variant().map(|_| cfg.train.d),
        folds: Vec::with_capacity(folds.n_folds),
        config: format!(
            "{} k={} normalize={}",
            TrainConfig { variant: method.variant().unwrap_or(cfg.train.variant), ..cfg.train.clone() }.echo(),
            cfg.k,
            cfg.normalize
        ),
        fold_signature: Some(folds.signature()),
        traces: Vec::new(),
    };
    for (f, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome.map_err(|e| with_fold(e, f))?;
        report.folds.push(outcome.metrics);
        report.traces.extend(outcome.trace);
    }
    Ok(report)
}

/// [`run_cv_experiment_cached`] with a fresh graph cache.
pub fn run_cv_experiment(
    data: &StudyData<'_>,
    method: Method,
    cfg: &ExperimentConfig,
    folds: &FoldAssignment,
) -> Result<EvalReport> {
    run_cv_experiment_cached(data, method, cfg, folds, &mut GraphCache::default())
}
