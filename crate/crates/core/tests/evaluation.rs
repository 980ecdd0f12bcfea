use cmf_core::evaluation::{mae, rmse, run_cv_experiment, EvalReport, ExperimentConfig, Method, StudyData};
use cmf_core::factorization::{TrainConfig, Variant};
use cmf_core::synthetic::{generate, Synthetic, SyntheticConfig};
use cmf_core::{Error, FoldAssignment};
use proptest::prelude::*;

fn study(s: &Synthetic) -> StudyData<'_> {
    StudyData { name: "synthetic", ratings: &s.ratings, users: &s.users, items: &s.items }
}

fn quick() -> ExperimentConfig {
    ExperimentConfig {
        train: TrainConfig { d: 3, alpha: 0.5, beta: 0.5, max_epochs: 40, ..Default::default() },
        k: 5,
        normalize: true,
    }
}

proptest! {
    #[test]
    fn metrics_match_one_line_oracle(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..200)) {
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let n = p.len() as f64;
        let oracle_mae = p.iter().zip(&t).fold(0.0, |acc, (a, b)| acc + (a - b).abs()) / n;
        let oracle_rmse = (p.iter().zip(&t).fold(0.0, |acc, (a, b)| acc + (a - b).powi(2)) / n).sqrt();
        let m = mae(&p, &t).unwrap();
        let r = rmse(&p, &t).unwrap();
        prop_assert!((m - oracle_mae).abs() < 1e-12);
        prop_assert!((r - oracle_rmse).abs() < 1e-12);
        prop_assert!(m <= r * (1.0 + 1e-12));
    }
}

#[test]
fn constant_predictor_scores_mean_absolute_deviation() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    let report = run_cv_experiment(&study(&s), Method::GlobalMean, &quick(), &folds).unwrap();
    assert_eq!(report.folds.len(), 5);
    for f in &report.folds {
        let train = s.ratings.subset(&folds.train_entries(f.fold));
        let test = folds.test_entries(f.fold);
        let mad: f64 = test.iter().map(|&e| (s.ratings.entries()[e].value - train.global_mean()).abs()).sum::<f64>() / test.len() as f64;
        assert!((f.mae - mad).abs() < 1e-12);
        assert_eq!(f.n_test, test.len());
    }
    let mean: f64 = report.folds.iter().map(|f| f.mae).sum::<f64>() / 5.0;
    assert!((report.mean_mae() - mean).abs() < 1e-12);
}

#[test]
fn same_seed_same_report() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    for method in [Method::Mf(Variant::Cmf), Method::Mf(Variant::Ismf), Method::Ubcf, Method::Ibcf] {
        let a = run_cv_experiment(&study(&s), method, &quick(), &folds).unwrap();
        let b = run_cv_experiment(&study(&s), method, &quick(), &folds).unwrap();
        assert_eq!(a.folds, b.folds, "{method}");
        assert_eq!(a.config, b.config);
        let objectives = |r: &EvalReport| -> Vec<Vec<f64>> { r.traces.iter().map(|t| t.objectives().collect()).collect() };
        assert_eq!(objectives(&a), objectives(&b));
        assert!(a.folds.iter().all(|f| f.mae <= f.rmse));
        if method.variant().is_some() {
            assert_eq!(a.traces.len(), 5);
            assert!(a.traces.iter().all(|t| t.is_non_increasing()));
        }
    }
}

#[test]
fn every_method_runs() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    for method in Method::all() {
        let r = run_cv_experiment(&study(&s), method, &quick(), &folds).unwrap();
        assert!(r.mean_rmse().is_finite(), "{method}");
        assert_eq!(r.d.is_some(), method.variant().is_some());
    }
}

#[test]
fn cmf_beats_constant_on_synthetic() {
    let s = generate(&SyntheticConfig { n_users: 40, n_items: 40, density: 0.4, ..Default::default() }).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 42).unwrap();
    let cfg = ExperimentConfig {
        train: TrainConfig { d: 4, alpha: 1.0, beta: 0.2, learning_rate: 0.01, max_epochs: 300, ..Default::default() },
        k: 10,
        normalize: true,
    };
    let cmf = run_cv_experiment(&study(&s), Method::Mf(Variant::Cmf), &cfg, &folds).unwrap();
    let constant = run_cv_experiment(&study(&s), Method::GlobalMean, &cfg, &folds).unwrap();
    assert!(cmf.mean_rmse() < constant.mean_rmse(), "{} vs {}", cmf.mean_rmse(), constant.mean_rmse());
}

#[test]
fn test_ratings_do_not_leak_into_training() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    let fold = 2;
    let test = folds.test_entries(fold);
    let mut values: Vec<f64> = s.ratings.entries().iter().map(|r| r.value).collect();
    for &e in &test {
        values[e] = 6.0 - values[e];
    }
    let mutated = s.ratings.with_values(&values).unwrap();
    let cfg = TrainConfig { d: 3, alpha: 0.5, beta: 0.5, max_epochs: 30, ..Default::default() };
    let graphs = |kind| {
        let o = cmf_core::coupling::GraphOptions::with_k(5);
        (
            cmf_core::coupling::attribute_neighbor_graph(&s.users, kind, &o).unwrap(),
            cmf_core::coupling::attribute_neighbor_graph(&s.items, kind, &o).unwrap(),
        )
    };
    let (ug, ig) = graphs(cmf_core::SimilarityKind::Coupled);
    let train_a = s.ratings.subset(&folds.train_entries(fold));
    let train_b = mutated.subset(&folds.train_entries(fold));
    let (a, _) = cmf_core::factorization::train(&train_a, Some(&ug), Some(&ig), &cfg).unwrap();
    let (b, _) = cmf_core::factorization::train(&train_b, Some(&ug), Some(&ig), &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fold_size_mismatch_is_argument_error() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len() + 1, 5, 3).unwrap();
    let err = run_cv_experiment(&study(&s), Method::GlobalMean, &quick(), &folds).unwrap_err();
    assert!(matches!(err, Error::Argument(_)));
}

#[test]
fn training_failure_carries_fold_id() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    let mut cfg = quick();
    cfg.train.lambda = 1e308;
    cfg.train.variant = Variant::Pmf;
    match run_cv_experiment(&study(&s), Method::Mf(Variant::Pmf), &cfg, &folds) {
        Err(Error::TrainingFailed { fold, .. }) => assert_eq!(fold, Some(0)),
        other => panic!("expected a training failure, got {other:?}"),
    }
}

#[test]
fn csv_has_one_row_per_method_and_fold() {
    let s = generate(&SyntheticConfig::default()).unwrap();
    let folds = FoldAssignment::new(s.ratings.len(), 5, 3).unwrap();
    let reports: Vec<EvalReport> = [Method::Mf(Variant::Pmf), Method::Mf(Variant::Cmf)]
        .into_iter()
        .map(|m| run_cv_experiment(&study(&s), m, &quick(), &folds).unwrap())
        .collect();
    let csv = EvalReport::to_csv(&reports).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10);
    let back = EvalReport::from_csv(&csv).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0].mean_mae(), reports[0].mean_mae());
}
