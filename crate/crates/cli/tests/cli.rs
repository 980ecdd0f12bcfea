use std::path::Path;
use std::process::{Command, Output};

use cmf_core::ingest::interchange::{write_prepared, Prepared};
use cmf_core::ingest::write_movielens;
use cmf_core::synthetic::{generate, SyntheticConfig};
use cmf_core::toy;

fn cmf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmf"))
        .args(args)
        .current_dir(cwd)
        .env_remove("CMF_OUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn raw_movielens(dir: &Path) {
    let s = generate(&SyntheticConfig { n_users: 30, n_items: 25, density: 0.4, ..Default::default() }).unwrap();
    write_movielens(dir, &s.ratings, &s.users, &s.items).unwrap();
}

fn toy_prepared(dir: &Path) {
    let p = Prepared { name: "toy".into(), ratings: toy::ratings(), users: toy::users(), items: toy::items() };
    write_prepared(dir, &p).unwrap();
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prepare_reports_counts_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    raw_movielens(&raw);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let out = ok(&cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", s(&a)], tmp.path()));
    assert!(out.starts_with("movielens: users=30 items=25"), "{out}");
    ok(&cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", s(&b)], tmp.path()));
    for f in ["dataset.tsv", "ratings.tsv", "users.tsv", "items.tsv", "summary.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn prepare_failures_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    raw_movielens(&raw);
    std::fs::write(raw.join("ratings.dat"), "").unwrap();
    let out = cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", "x"], tmp.path());
    assert!(!out.status.success());

    std::fs::write(raw.join("ratings.dat"), "1::1::5::0\n1::2\n").unwrap();
    let out = cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", "x"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("ratings.dat:2"), "{}", stderr(&out));
}

#[test]
fn couple_toy_items() {
    let tmp = tempfile::tempdir().unwrap();
    toy_prepared(&tmp.path().join("toy"));
    let graph = tmp.path().join("items.graph");
    ok(&cmf(&["couple", "--data", "toy", "--entities", "items", "--kind", "coupled", "--k", "3", "--raw", "--out", s(&graph)], tmp.path()));
    let text = std::fs::read_to_string(&graph).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text, "0\t1:1.33333333333\n1\t0:1.33333333333\n2\t3:1.33333333333\n3\t2:1.33333333333\n");

    ok(&cmf(&["couple", "--data", "toy", "--entities", "items", "--kind", "cosine", "--k", "1", "--out", s(&graph)], tmp.path()));
    let text = std::fs::read_to_string(&graph).unwrap();
    assert!(text.lines().all(|l| l.split('\t').nth(1).unwrap().split(',').filter(|p| !p.is_empty()).count() <= 1));

    let out = cmf(&["couple", "--data", "toy", "--entities", "items", "--k", "0"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("at least 1"));
}

#[test]
fn couple_jaccard_identical_rows_uniform() {
    let tmp = tempfile::tempdir().unwrap();
    let rows: Vec<Vec<&str>> = (0..4).map(|_| vec!["x", "y"]).collect();
    let users = cmf_core::AttributeTable::from_rows(&["a", "b"], &rows).unwrap();
    let ratings = cmf_core::RatingDataset::from_indexed(4, 1, vec![cmf_core::ingest::Rating { user: 0, item: 0, value: 3.0 }], (1.0, 5.0)).unwrap();
    let items = cmf_core::AttributeTable::from_rows(&["g"], &[vec!["z"]]).unwrap();
    write_prepared(&tmp.path().join("same"), &Prepared { name: "same".into(), ratings, users, items }).unwrap();
    ok(&cmf(&["couple", "--data", "same", "--entities", "users", "--kind", "jaccard", "--k", "3", "--out", "g"], tmp.path()));
    let text = std::fs::read_to_string(tmp.path().join("g")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "0\t1:0.333333333333,2:0.333333333333,3:0.333333333333");
}

#[test]
fn train_is_idempotent_and_honours_out_dir_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    raw_movielens(&raw);
    ok(&cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", "ml"], tmp.path()));
    std::fs::write(tmp.path().join("run.cfg"), "# small run\ndata = ml\nalpha = 1.0\nbeta = 0.2\nd = 4\nmax_epochs = 30\nk = 5\nout_dir = from-config\n").unwrap();
    ok(&cmf(&["train", "--config", "run.cfg"], tmp.path()));
    let first = std::fs::read(tmp.path().join("from-config/CMF-d4.model")).unwrap();
    ok(&cmf(&["train", "--config", "run.cfg", "--out-dir", "flag"], tmp.path()));
    assert_eq!(first, std::fs::read(tmp.path().join("flag/CMF-d4.model")).unwrap());
    assert_eq!(
        std::fs::read(tmp.path().join("from-config/CMF-d4.trace.tsv")).unwrap(),
        std::fs::read(tmp.path().join("flag/CMF-d4.trace.tsv")).unwrap()
    );

    let out = Command::new(env!("CARGO_BIN_EXE_cmf"))
        .args(["train", "--data", "ml", "--variant", "PMF", "-d", "3", "--max-epochs", "5"])
        .current_dir(tmp.path())
        .env("CMF_OUT_DIR", "from-env")
        .output()
        .unwrap();
    ok(&out);
    assert!(tmp.path().join("from-env/PMF-d3.model").exists());
}

#[test]
fn config_errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.cfg"), "alpha = 1.0\ngamma = 2\n").unwrap();
    let out = cmf(&["train", "--config", "bad.cfg"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("gamma"));
    std::fs::write(tmp.path().join("bad.cfg"), "learning_rate = 0\n").unwrap();
    assert!(!cmf(&["train", "--config", "bad.cfg"], tmp.path()).status.success());
}

#[test]
fn training_failure_names_trace_file() {
    let tmp = tempfile::tempdir().unwrap();
    toy_prepared(&tmp.path().join("toy"));
    let out = cmf(&["train", "--data", "toy", "--variant", "PMF", "--lambda", "1e308", "-d", "2", "--out-dir", "o"], tmp.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("PMF-d2-failed.trace.tsv"), "{}", stderr(&out));
    assert!(tmp.path().join("o/PMF-d2-failed.trace.tsv").exists());
}

#[test]
fn evaluate_writes_one_row_per_method_and_fold() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw");
    raw_movielens(&raw);
    ok(&cmf(&["prepare", "--dataset", "movielens", "--input", s(&raw), "--out", "ml"], tmp.path()));
    let args = [
        "evaluate", "--data", "ml", "--methods", "PMF,CMF", "-d", "10", "--alpha", "1.0", "--beta", "0.2", "--max-epochs", "20", "--k", "5",
        "--out-dir", "ev",
    ];
    let table = ok(&cmf(&args, tmp.path()));
    let csv = std::fs::read_to_string(tmp.path().join("ev/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("dataset,method,d,fold,mae,rmse\n"));
    assert!(table.contains("*CMF*"), "{table}");

    let again = tmp.path().join("again.csv");
    let mut args2 = args.to_vec();
    args2.extend(["--out-csv", s(&again)]);
    ok(&cmf(&args2, tmp.path()));
    assert_eq!(csv, std::fs::read_to_string(&again).unwrap());

    let cmp = ok(&cmf(&["compare", "--reports", "ev/report.csv", "--target", "CMF"], tmp.path()));
    assert!(cmp.contains("PMF") && cmp.contains("*CMF*"));
}

#[test]
fn compare_hand_built_reports() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("pmf.csv"), "dataset,method,d,fold,mae,rmse\nml,PMF,100,0,1.1787,1.5\n").unwrap();
    std::fs::write(tmp.path().join("cmf.csv"), "dataset,method,d,fold,mae,rmse\nml,CMF,100,0,0.8978,1.2\n").unwrap();
    let out = ok(&cmf(&["compare", "--reports", "pmf.csv", "cmf.csv", "--out-csv", "c.csv"], tmp.path()));
    assert!(out.contains("1.1787 (31.29%)"), "{out}");
    assert!(out.contains("*0.8978*"));
    let csv = std::fs::read_to_string(tmp.path().join("c.csv")).unwrap();
    assert!(csv.contains("ml,100,MAE,PMF,1.1787,31.29"));

    std::fs::write(tmp.path().join("other.csv"), "dataset,method,d,fold,mae,rmse\nml,PMF,100,1,1.0,1.5\n").unwrap();
    assert!(!cmf(&["compare", "--reports", "other.csv", "cmf.csv"], tmp.path()).status.success());
}
