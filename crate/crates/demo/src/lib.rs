//! Browser demo: toy-table similarities, toy rating completion and synthetic
//! training curves. Every export returns a JSON string; errors come back as
//! `{"error": "..."}`.

use cmf_core::coupling::{attribute_neighbor_graph, simple_attribute_similarity, GraphOptions};
use cmf_core::factorization::{train, TrainConfig, Variant};
use cmf_core::synthetic::{generate, SyntheticConfig};
use cmf_core::{toy, AttributeTable, CouplingModel, FoldAssignment, SimilarityKind};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Term {
    attribute: String,
    x: String,
    y: String,
    intra: f64,
    inter: f64,
}

#[derive(Serialize)]
struct SimilarityView {
    kind: String,
    labels: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<Vec<String>>,
    matrix: Vec<Vec<f64>>,
    /// Per-pair, per-attribute coupling terms (coupled kind only).
    terms: Option<Vec<Vec<Vec<Term>>>>,
}

fn toy_side(side: &str) -> Result<(AttributeTable, Vec<String>), String> {
    match side {
        "items" => Ok((toy::items(), toy::MOVIES.iter().map(|s| s.to_string()).collect())),
        "users" => Ok((toy::users(), toy::USERS.iter().map(|s| s.to_string()).collect())),
        other => Err(format!("unknown side {other:?}")),
    }
}

pub fn similarity_view(kind: &str, side: &str) -> Result<String, String> {
    let kind: SimilarityKind = kind.parse().map_err(|e: cmf_core::Error| e.to_string())?;
    if !kind.is_attribute_based() {
        return Err(format!("{kind} is not an attribute similarity"));
    }
    let (table, labels) = toy_side(side)?;
    let n = table.n_entities();
    let model = CouplingModel::new(&table);
    let mut matrix = vec![vec![0.0; n]; n];
    for (a, row) in matrix.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = match kind {
                SimilarityKind::Coupled => model.similarity(a, b),
                _ => simple_attribute_similarity(kind, &table, a, b).map_err(|e| e.to_string())?,
            };
        }
    }
    let terms = (kind == SimilarityKind::Coupled).then(|| {
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..table.n_attributes())
                            .map(|k| {
                                let (x, y) = (table.value(a, k), table.value(b, k));
                                Term {
                                    attribute: table.attribute_names()[k].clone(),
                                    x: table.label(k, x).to_string(),
                                    y: table.label(k, y).to_string(),
                                    intra: model.intra(k, x, y).unwrap_or(0.0),
                                    inter: model.inter(k, x, y).unwrap_or(0.0),
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    });
    let rows = (0..n)
        .map(|e| (0..table.n_attributes()).map(|k| table.label(k, table.value(e, k)).to_string()).collect())
        .collect();
    let view = SimilarityView {
        kind: kind.to_string(),
        labels,
        attributes: table.attribute_names().to_vec(),
        rows,
        matrix,
        terms,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub d: usize,
    pub k: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams { alpha: 1.0, beta: 0.2, lambda: 0.05, d: 5, k: 20, learning_rate: 0.02, epochs: 300, seed: 42 }
    }
}

impl TrainParams {
    fn config(&self, variant: Variant) -> TrainConfig {
        TrainConfig {
            d: self.d,
            lambda: self.lambda,
            alpha: self.alpha,
            beta: self.beta,
            learning_rate: self.learning_rate,
            max_epochs: self.epochs,
            seed: self.seed,
            variant,
            ..Default::default()
        }
    }
}

#[derive(Serialize)]
struct Curve {
    method: String,
    objective: Vec<f64>,
    step: Vec<f64>,
    test_rmse: f64,
    test_mae: f64,
}

#[derive(Serialize)]
struct Curves {
    n_ratings: usize,
    n_test: usize,
    constant_rmse: f64,
    curves: Vec<Curve>,
}

/// CMF and PMF trained on one split of a generated dataset.
pub fn training_curves(params: &str) -> Result<String, String> {
    let p: TrainParams = if params.trim().is_empty() {
        TrainParams::default()
    } else {
        serde_json::from_str(params).map_err(|e| e.to_string())?
    };
    if p.epochs > 2000 || p.d > 50 {
        return Err("keep epochs <= 2000 and d <= 50 in the browser".into());
    }
    let s = generate(&SyntheticConfig { n_users: 120, n_items: 100, n_clusters: 4, density: 0.08, seed: 3, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let folds = FoldAssignment::new(s.ratings.len(), 5, p.seed).map_err(|e| e.to_string())?;
    let train_set = s.ratings.subset(&folds.train_entries(0));
    let test: Vec<_> = folds.test_entries(0).into_iter().map(|e| s.ratings.entries()[e]).collect();
    let opts = GraphOptions::with_k(p.k.max(1));
    let ug = attribute_neighbor_graph(&s.users, SimilarityKind::Coupled, &opts).map_err(|e| e.to_string())?;
    let ig = attribute_neighbor_graph(&s.items, SimilarityKind::Coupled, &opts).map_err(|e| e.to_string())?;

    let mut curves = Vec::new();
    for variant in [Variant::Cmf, Variant::Pmf] {
        let (model, trace) = train(&train_set, Some(&ug), Some(&ig), &p.config(variant)).map_err(|e| e.to_string())?;
        let (mut se, mut ae) = (0.0, 0.0);
        for r in &test {
            let err = model.predict(r.user, r.item, true).map_err(|e| e.to_string())? - r.value;
            se += err * err;
            ae += err.abs();
        }
        curves.push(Curve {
            method: variant.to_string(),
            objective: std::iter::once(trace.initial_objective).chain(trace.objectives()).collect(),
            step: trace.epochs.iter().map(|e| e.learning_rate).collect(),
            test_rmse: (se / test.len() as f64).sqrt(),
            test_mae: ae / test.len() as f64,
        });
    }
    let mean = train_set.global_mean();
    let constant_rmse = (test.iter().map(|r| (r.value - mean).powi(2)).sum::<f64>() / test.len() as f64).sqrt();
    serde_json::to_string(&Curves { n_ratings: s.ratings.len(), n_test: test.len(), constant_rmse, curves }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Completion {
    users: Vec<String>,
    items: Vec<String>,
    observed: Vec<Vec<Option<f64>>>,
    predicted: Vec<Vec<f64>>,
    final_objective: f64,
}

/// Fills the toy rating matrix with a model trained on its observed cells.
pub fn toy_completion(variant: &str, params: &str) -> Result<String, String> {
    let variant: Variant = variant.parse().map_err(|e: cmf_core::Error| e.to_string())?;
    let p: TrainParams = if params.trim().is_empty() {
        TrainParams { d: 2, k: 3, learning_rate: 0.05, epochs: 500, ..Default::default() }
    } else {
        serde_json::from_str(params).map_err(|e| e.to_string())?
    };
    let ds = toy::ratings();
    let cfg = p.config(variant);
    let kind = variant.similarity();
    let opts = GraphOptions::with_k(p.k.max(1));
    let graphs = match kind {
        Some(k) if k.is_attribute_based() => Some((
            attribute_neighbor_graph(&toy::users(), k, &opts).map_err(|e| e.to_string())?,
            attribute_neighbor_graph(&toy::items(), k, &opts).map_err(|e| e.to_string())?,
        )),
        Some(_) => return Err(format!("{variant} needs rating graphs; pick CMF, PMF, RSVD, PSMF, CSMF or JSMF")),
        None => None,
    };
    let (model, trace) = train(&ds, graphs.as_ref().map(|g| &g.0), graphs.as_ref().map(|g| &g.1), &cfg).map_err(|e| e.to_string())?;
    let lookup = ds.lookup();
    let observed = (0..ds.n_users()).map(|u| (0..ds.n_items()).map(|i| lookup.get(&(u, i)).copied()).collect()).collect();
    let predicted = (0..ds.n_users())
        .map(|u| (0..ds.n_items()).map(|i| model.predict(u, i, true).unwrap_or(f64::NAN)).collect())
        .collect();
    serde_json::to_string(&Completion {
        users: ds.user_ids().to_vec(),
        items: ds.item_ids().to_vec(),
        observed,
        predicted,
        final_objective: trace.final_objective(),
    })
    .map_err(|e| e.to_string())
}

fn json_result(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| serde_json::json!({ "error": e }).to_string())
}

#[wasm_bindgen(js_name = similarityMatrix)]
pub fn similarity_matrix_js(kind: &str, side: &str) -> String {
    json_result(similarity_view(kind, side))
}

#[wasm_bindgen(js_name = trainingCurves)]
pub fn training_curves_js(params: &str) -> String {
    json_result(training_curves(params))
}

#[wasm_bindgen(js_name = toyCompletion)]
pub fn toy_completion_js(variant: &str, params: &str) -> String {
    json_result(toy_completion(variant, params))
}
