use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cmf_core::coupling::{attribute_neighbor_graph, rating_neighbor_graph, Axis, GraphOptions};
use cmf_core::evaluation::{
    emit_comparison, run_cv_experiment_cached, summary_table, EvalReport, ExperimentConfig, GraphCache, Method, StudyData,
};
use cmf_core::factorization::{train as train_model, TrainTrace};
use cmf_core::ingest::interchange::{read_prepared, write_prepared, Prepared};
use cmf_core::ingest::{parse_bookcrossing, parse_movielens_with, Ingested, MovieLensOptions};
use cmf_core::{format_significant, Error, FoldAssignment, NeighborGraph, SimilarityKind};
use log::info;

use crate::config::RunConfig;
use crate::{CompareArgs, CoupleArgs, DatasetKind, Entities, EvaluateArgs, Overrides, PrepareArgs, TrainArgs};

pub const OUT_DIR_ENV: &str = "CMF_OUT_DIR";

/// Flag, then config file, then `$CMF_OUT_DIR`, then `./cmf-out`.
fn out_dir(flag: Option<&Path>, cfg: Option<&Path>) -> PathBuf {
    flag.or(cfg)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cmf-out"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &o.data {
        cfg.data = Some(v.clone());
    }
    if let Some(v) = &o.out_dir {
        cfg.out_dir = Some(v.clone());
    }
    if let Some(v) = &o.user_graph {
        cfg.user_graph = Some(v.clone());
    }
    if let Some(v) = &o.item_graph {
        cfg.item_graph = Some(v.clone());
    }
    let t = &mut cfg.train;
    t.d = o.dim.unwrap_or(t.d);
    t.lambda = o.lambda.unwrap_or(t.lambda);
    t.alpha = o.alpha.unwrap_or(t.alpha);
    t.beta = o.beta.unwrap_or(t.beta);
    t.learning_rate = o.learning_rate.unwrap_or(t.learning_rate);
    t.max_epochs = o.max_epochs.unwrap_or(t.max_epochs);
    t.seed = o.seed.unwrap_or(t.seed);
    cfg.k = o.k.unwrap_or(cfg.k);
    cfg.validate()?;
    Ok(cfg)
}

fn load_data(cfg: &RunConfig) -> Result<Prepared> {
    let dir = cfg.data.as_ref().ok_or_else(|| anyhow!("no dataset given: pass --data or set data in the config"))?;
    read_prepared(dir).with_context(|| format!("loading prepared dataset {}", dir.display()))
}

fn log_graph(what: &str, g: &NeighborGraph) {
    let (lo, hi, mean) = g.length_stats();
    info!("{what}: {} lists, length min {lo} max {hi} mean {mean:.2}", g.n_entities());
}

fn build_graph(data: &Prepared, axis: Axis, kind: SimilarityKind, opts: &GraphOptions) -> Result<NeighborGraph> {
    let table = match axis {
        Axis::User => &data.users,
        Axis::Item => &data.items,
    };
    let g = if kind.is_attribute_based() {
        attribute_neighbor_graph(table, kind, opts)?
    } else {
        rating_neighbor_graph(&data.ratings, axis, opts)?
    };
    Ok(g)
}

fn load_graph(path: &Path, kind: SimilarityKind, expected: usize) -> Result<NeighborGraph> {
    let g = NeighborGraph::from_text(&read_text(path)?, kind).with_context(|| format!("in {}", path.display()))?;
    if g.n_entities() != expected {
        bail!("{} has {} lists, expected {expected}", path.display(), g.n_entities());
    }
    Ok(g)
}

fn trace_text(trace: &TrainTrace) -> String {
    // wall time is logged, not written, so reruns give identical files
    let mut out = String::from("epoch\tobjective\tgrad_norm\tlearning_rate\n");
    let _ = writeln!(out, "0\t{}\t\t", format_significant(trace.initial_objective, 17));
    for (e, r) in trace.epochs.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            e + 1,
            format_significant(r.objective, 17),
            format_significant(r.grad_norm, 17),
            format_significant(r.learning_rate, 17)
        );
    }
    out
}

/// Saves the trace of a failed run and turns the error into a message
/// naming the trace file.
fn report_failure(err: Error, dir: &Path, label: &str) -> anyhow::Error {
    if let Error::TrainingFailed { fold, message, trace } = &err {
        let path = dir.join(format!("{label}-failed.trace.tsv"));
        let fold = fold.map(|f| format!(" in fold {f}")).unwrap_or_default();
        return match write(&path, &trace_text(trace)) {
            Ok(()) => anyhow!("{label} training failed{fold}: {message}; trace written to {}", path.display()),
            Err(e) => anyhow!("{label} training failed{fold}: {message}; could not write trace: {e}"),
        };
    }
    err.into()
}

pub fn prepare(a: PrepareArgs) -> Result<()> {
    let ingested: Ingested = match a.dataset {
        DatasetKind::Movielens => parse_movielens_with(&a.input, &MovieLensOptions { max_ratings: a.max_ratings })?,
        DatasetKind::Bookcrossing => {
            if a.max_ratings.is_some() {
                bail!("--max-ratings is only supported for movielens");
            }
            parse_bookcrossing(&a.input)?
        }
    };
    if ingested.ratings.is_empty() {
        bail!("{}: no ratings parsed from {}", ingested.name, a.input.display());
    }
    for note in &ingested.summary.notes {
        info!("{note}");
    }
    let dir = out_dir(a.out.as_deref(), None);
    let summary = ingested.summary_line();
    let prepared = Prepared { name: ingested.name, ratings: ingested.ratings, users: ingested.users, items: ingested.items };
    write_prepared(&dir, &prepared)?;
    write(&dir.join("summary.txt"), &format!("{summary}\n"))?;
    println!("{summary}");
    Ok(())
}

pub fn couple(a: CoupleArgs) -> Result<()> {
    let kind: SimilarityKind = a.kind.parse()?;
    if a.k == 0 {
        return Err(Error::Config("neighborhood size K must be at least 1".into()).into());
    }
    let data = read_prepared(&a.data).with_context(|| format!("loading prepared dataset {}", a.data.display()))?;
    let (axis, label) = match a.entities {
        Entities::Users => (Axis::User, "users"),
        Entities::Items => (Axis::Item, "items"),
    };
    let opts = GraphOptions { k: a.k, keep_nonpositive: a.keep_nonpositive, normalize: !a.raw };
    let graph = build_graph(&data, axis, kind, &opts)?;
    log_graph(&format!("{label} {kind} K={}", a.k), &graph);
    let path = a.out.unwrap_or_else(|| out_dir(None, None).join(format!("{label}-{kind}.graph")));
    write(&path, &graph.to_text())?;
    println!("{}", path.display());
    Ok(())
}

fn graphs_for(cfg: &RunConfig, data: &Prepared, kind: SimilarityKind, alpha: f64, beta: f64) -> Result<(Option<NeighborGraph>, Option<NeighborGraph>)> {
    let opts = GraphOptions { k: cfg.k, keep_nonpositive: false, normalize: cfg.normalize };
    let side = |weight: f64, file: &Option<PathBuf>, axis: Axis, n: usize| -> Result<Option<NeighborGraph>> {
        if weight == 0.0 {
            return Ok(None);
        }
        let g = match file {
            Some(path) => load_graph(path, kind, n)?,
            None => build_graph(data, axis, kind, &opts)?,
        };
        log_graph(&format!("{axis:?} {kind}"), &g);
        Ok(Some(g))
    };
    Ok((
        side(alpha, &cfg.user_graph, Axis::User, data.ratings.n_users())?,
        side(beta, &cfg.item_graph, Axis::Item, data.ratings.n_items())?,
    ))
}

pub fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = load_config(&a.common)?;
    if let Some(v) = &a.variant {
        cfg.train.variant = v.parse()?;
    }
    let data = load_data(&cfg)?;
    let tc = cfg.train.clone();
    let (ug, ig) = match tc.variant.similarity() {
        Some(kind) => graphs_for(&cfg, &data, kind, tc.effective_alpha(), tc.effective_beta())?,
        None => (None, None),
    };
    let dir = out_dir(a.common.out_dir.as_deref(), cfg.out_dir.as_deref());
    let label = format!("{}-d{}", tc.variant, tc.d);
    info!("training {} on {} ({} ratings)", tc.echo(), data.name, data.ratings.len());
    let (model, trace) = train_model(&data.ratings, ug.as_ref(), ig.as_ref(), &tc).map_err(|e| report_failure(e, &dir, &label))?;
    info!(
        "{} epochs, objective {} -> {}, converged {}, {:.2}s",
        trace.epochs.len(),
        trace.initial_objective,
        trace.final_objective(),
        trace.converged,
        trace.epochs.last().map_or(0.0, |e| e.seconds)
    );
    let model_path = dir.join(format!("{label}.model"));
    write(&model_path, &model.to_text())?;
    write(&dir.join(format!("{label}.trace.tsv")), &trace_text(&trace))?;
    println!("{}", model_path.display());
    Ok(())
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| anyhow!("bad dimension {t:?}")))
        .collect::<Result<_>>()?;
    if dims.is_empty() || dims.contains(&0) {
        bail!("dimensions must be a non-empty list of positive integers");
    }
    Ok(dims)
}

pub fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut cfg = load_config(&a.common)?;
    if let Some(m) = &a.methods {
        cfg.methods = Method::parse_list(m)?;
    }
    if let Some(f) = a.folds {
        cfg.folds = f;
    }
    if let Some(t) = &a.target {
        cfg.target = Some(t.parse()?);
    }
    cfg.validate()?;
    let dims = match &a.dims {
        Some(s) => parse_dims(s)?,
        None => vec![cfg.train.d],
    };
    let data = load_data(&cfg)?;
    let dir = out_dir(a.common.out_dir.as_deref(), cfg.out_dir.as_deref());
    let folds = FoldAssignment::new(data.ratings.len(), cfg.folds, cfg.train.seed)?;
    info!("{}: {} ratings, {} folds, signature {:016x}", data.name, data.ratings.len(), cfg.folds, folds.signature());

    let mut cache = GraphCache::default();
    if cfg.user_graph.is_some() || cfg.item_graph.is_some() {
        let kind: SimilarityKind = a.graph_kind.parse()?;
        if let Some(p) = &cfg.user_graph {
            cache.insert(Axis::User, load_graph(p, kind, data.ratings.n_users())?);
        }
        if let Some(p) = &cfg.item_graph {
            cache.insert(Axis::Item, load_graph(p, kind, data.ratings.n_items())?);
        }
    }
    let study = StudyData { name: &data.name, ratings: &data.ratings, users: &data.users, items: &data.items };
    let mut reports = Vec::new();
    for &method in &cfg.methods {
        let method_dims: &[usize] = if method.variant().is_some() { &dims } else { &dims[..1] };
        for &d in method_dims {
            let mut ec = ExperimentConfig { train: cfg.train.clone(), k: cfg.k, normalize: cfg.normalize };
            ec.train.d = d;
            let label = match method.variant() {
                Some(_) => format!("{method}-d{d}"),
                None => method.to_string(),
            };
            let report = run_cv_experiment_cached(&study, method, &ec, &folds, &mut cache).map_err(|e| report_failure(e, &dir, &label))?;
            info!("{label}: MAE {:.4} RMSE {:.4}", report.mean_mae(), report.mean_rmse());
            reports.push(report);
        }
    }

    let csv_path = a.out_csv.unwrap_or_else(|| dir.join("report.csv"));
    write(&csv_path, &EvalReport::to_csv(&reports)?)?;
    let mut table = summary_table(&reports);
    let target = cfg.target.or_else(|| cfg.methods.contains(&Method::Mf(cmf_core::Variant::Cmf)).then_some(Method::Mf(cmf_core::Variant::Cmf)));
    if let Some(target) = target.filter(|t| cfg.methods.contains(t)) {
        let baselines: Vec<Method> = cfg.methods.iter().copied().filter(|&m| m != target).collect();
        if !baselines.is_empty() {
            table.push('\n');
            table.push_str(&emit_comparison(&reports, &baselines, target)?.text);
        }
    }
    let table_path = a.out_table.unwrap_or_else(|| dir.join("summary.txt"));
    write(&table_path, &table)?;
    print!("{table}");
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<()> {
    let mut reports = Vec::new();
    for path in &a.reports {
        reports.extend(EvalReport::from_csv(&read_text(path)?).with_context(|| format!("in {}", path.display()))?);
    }
    let target: Method = a.target.parse()?;
    let baselines = match &a.baselines {
        Some(list) => Method::parse_list(list)?,
        None => {
            let mut seen = Vec::new();
            for r in &reports {
                if r.method != target && !seen.contains(&r.method) {
                    seen.push(r.method);
                }
            }
            seen
        }
    };
    let cmp = emit_comparison(&reports, &baselines, target)?;
    if let Some(p) = &a.out_table {
        write(p, &cmp.text)?;
    }
    if let Some(p) = &a.out_csv {
        write(p, &cmp.csv)?;
    }
    print!("{}", cmp.text);
    Ok(())
}
