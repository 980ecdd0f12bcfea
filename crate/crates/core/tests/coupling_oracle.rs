//! Coupled and one-hot similarities against brute-force recomputation.

use std::collections::BTreeSet;

use cmf_core::coupling::{
    attribute_neighbor_graph, build_neighbor_graph, coupled_similarity, simple_attribute_similarity, GraphOptions,
};
use cmf_core::{toy, AttributeTable, CouplingModel, SimilarityKind};
use proptest::prelude::*;

/// Coupled similarity computed straight from the definitions on string rows:
/// g-sets as explicit entity sets, conditional probabilities by counting.
fn brute_force(rows: &[Vec<String>], a: usize, b: usize) -> f64 {
    let n_attr = rows[0].len();
    let g = |k: usize, v: &str| -> BTreeSet<usize> { (0..rows.len()).filter(|&e| rows[e][k] == v).collect() };
    let mut total = 0.0;
    for k in 0..n_attr {
        let (x, y) = (&rows[a][k], &rows[b][k]);
        let gx = g(k, x);
        let gy = g(k, y);
        let (fx, fy) = (gx.len() as f64, gy.len() as f64);
        let intra = fx * fy / (fx + fy + fx * fy);
        let inter = if n_attr == 1 || x == y {
            1.0
        } else {
            let mut s = 0.0;
            for j in (0..n_attr).filter(|&j| j != k) {
                let values: BTreeSet<&String> = rows.iter().map(|r| &r[j]).collect();
                for w in values {
                    let gw = g(j, w);
                    let px = gw.intersection(&gx).count() as f64 / fx;
                    let py = gw.intersection(&gy).count() as f64 / fy;
                    s += px.min(py) / (n_attr - 1) as f64;
                }
            }
            s
        };
        total += intra * inter;
    }
    total
}

fn table_of(rows: &[Vec<String>]) -> AttributeTable {
    let names: Vec<String> = (0..rows[0].len()).map(|k| format!("a{k}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    AttributeTable::from_rows(&names, rows).unwrap()
}

fn toy_rows() -> Vec<Vec<String>> {
    let t = toy::items();
    (0..t.n_entities())
        .map(|e| (0..t.n_attributes()).map(|k| t.label(k, t.value(e, k)).to_string()).collect())
        .collect()
}

#[test]
fn toy_items_match_brute_force() {
    let rows = toy_rows();
    let table = toy::items();
    for a in 0..4 {
        for b in 0..4 {
            let got = coupled_similarity(&table, a, b).unwrap();
            assert!((got - brute_force(&rows, a, b)).abs() < 1e-12, "({a},{b})");
        }
    }
    assert!((coupled_similarity(&table, 0, 1).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!((coupled_similarity(&table, 2, 3).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(coupled_similarity(&table, 0, 2).unwrap(), 0.0);
}

#[test]
fn toy_users_match_brute_force() {
    let t = toy::users();
    let rows: Vec<Vec<String>> = (0..t.n_entities())
        .map(|e| (0..t.n_attributes()).map(|k| t.label(k, t.value(e, k)).to_string()).collect())
        .collect();
    for a in 0..3 {
        for b in 0..3 {
            let got = coupled_similarity(&t, a, b).unwrap();
            assert!((got - brute_force(&rows, a, b)).abs() < 1e-12);
        }
    }
}

#[test]
fn toy_one_hot_hand_values() {
    let t = toy::items();
    // GodFather/GoodFellas share actor and genre: 2 of 3 attributes, width 11
    let cos = simple_attribute_similarity(SimilarityKind::Cosine, &t, 0, 1).unwrap();
    let jac = simple_attribute_similarity(SimilarityKind::Jaccard, &t, 0, 1).unwrap();
    let pea = simple_attribute_similarity(SimilarityKind::Pearson, &t, 0, 1).unwrap();
    assert!((cos - 2.0 / 3.0).abs() < 1e-15);
    assert!((jac - 0.5).abs() < 1e-15);
    assert!((pea - 13.0 / 24.0).abs() < 1e-15);
    let pea_far = simple_attribute_similarity(SimilarityKind::Pearson, &t, 0, 2).unwrap();
    assert!((pea_far + 9.0 / 24.0).abs() < 1e-15);
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    (2usize..=10, 1usize..=4).prop_flat_map(|(n, j)| {
        prop::collection::vec(prop::collection::vec(0u8..3, j), n)
            .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(|v| format!("v{v}")).collect()).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tables_match_brute_force(rows in rows_strategy()) {
        let table = table_of(&rows);
        let model = CouplingModel::new(&table);
        for a in 0..rows.len() {
            for b in 0..rows.len() {
                let got = model.similarity(a, b);
                prop_assert!((got - brute_force(&rows, a, b)).abs() < 1e-12);
                prop_assert!((got - model.similarity(b, a)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grouped_graph_equals_scan(rows in rows_strategy(), k in 1usize..6, normalize: bool) {
        let table = table_of(&rows);
        let model = CouplingModel::new(&table);
        let opts = GraphOptions { k, keep_nonpositive: false, normalize };
        for kind in [SimilarityKind::Coupled, SimilarityKind::Cosine, SimilarityKind::Jaccard, SimilarityKind::Pearson] {
            let fast = attribute_neighbor_graph(&table, kind, &opts).unwrap();
            let slow = build_neighbor_graph(table.n_entities(), kind, &opts, |i, j| match kind {
                SimilarityKind::Coupled => model.similarity(i, j),
                _ => simple_attribute_similarity(kind, &table, i, j).unwrap(),
            })
            .unwrap();
            prop_assert_eq!(fast, slow);
        }
    }
}

#[test]
fn jaccard_identical_rows_give_uniform_weights() {
    let rows: Vec<Vec<String>> = (0..5).map(|_| vec!["a".to_string(), "b".to_string()]).collect();
    let table = table_of(&rows);
    let g = attribute_neighbor_graph(&table, SimilarityKind::Jaccard, &GraphOptions::with_k(4)).unwrap();
    for u in 0..5 {
        assert_eq!(g.neighbors(u).len(), 4);
        assert!(g.neighbors(u).iter().all(|&(_, w)| (w - 0.25).abs() < 1e-15));
    }
}

#[test]
fn pearson_without_shared_values_gives_empty_lists() {
    // no two rows share any value, so every Pearson correlation is negative
    let rows: Vec<Vec<String>> = (0..4).map(|e| vec![format!("a{e}"), format!("b{e}")]).collect();
    let table = table_of(&rows);
    let g = attribute_neighbor_graph(&table, SimilarityKind::Pearson, &GraphOptions::with_k(3)).unwrap();
    assert!(g.lists().iter().all(Vec::is_empty));
}
