use crate::error::{Error, Result};
use crate::ingest::AttributeTable;

/// Vocabularies up to this size get a precomputed value-pair table.
const DENSE_VOCAB_LIMIT: usize = 256;

/// Value statistics of one attribute table, precomputed for coupled similarity.
///
/// For attribute `k` and values `x`, `y`:
///
/// * intra-coupling `|g(x)|·|g(y)| / (|g(x)| + |g(y)| + |g(x)|·|g(y)|)`, where
///   `g(v)` is the set of entities taking value `v`;
/// * inter-coupling: the mean over the other attributes `j` of
///   `Σ_w min(P(w|x), P(w|y))`, with `P(w|x) = |g_j(w) ∩ g_k(x)| / |g_k(x)|`.
///   It is 1 for identical values and, by convention, for single-attribute
///   tables.
///
/// The similarity of two entities is `Σ_k intra_k · inter_k` over their values.
#[derive(Debug, Clone)]
pub struct CouplingModel<'a> {
    table: &'a AttributeTable,
    /// `freq[k][v] = |g_k(v)|`
    freq: Vec<Vec<u32>>,
    /// `cooc[k][x][j]`: sorted `(w, |g_j(w) ∩ g_k(x)|)` for `j != k`; empty at `j == k`.
    cooc: Vec<Vec<Vec<Vec<(u32, u32)>>>>,
    /// `dense[k][x * |V_k| + y]` = intra · inter, for small vocabularies.
    dense: Vec<Option<Vec<f64>>>,
}

impl<'a> CouplingModel<'a> {
    pub fn new(table: &'a AttributeTable) -> Self {
        let n_attr = table.n_attributes();
        let mut freq: Vec<Vec<u32>> = (0..n_attr).map(|k| vec![0; table.vocab_size(k)]).collect();
        for e in 0..table.n_entities() {
            for (k, &v) in table.row(e).iter().enumerate() {
                freq[k][v as usize] += 1;
            }
        }

        let mut cooc = Vec::with_capacity(n_attr);
        for k in 0..n_attr {
            let mut per_value: Vec<Vec<Vec<(u32, u32)>>> =
                vec![vec![Vec::new(); n_attr]; table.vocab_size(k)];
            for e in 0..table.n_entities() {
                let row = table.row(e);
                let x = row[k] as usize;
                for (j, &w) in row.iter().enumerate() {
                    if j != k {
                        per_value[x][j].push((w, 1));
                    }
                }
            }
            for lists in per_value.iter_mut() {
                for list in lists.iter_mut() {
                    *list = tally(std::mem::take(list));
                }
            }
            cooc.push(per_value);
        }

        let mut model = CouplingModel {
            table,
            freq,
            cooc,
            dense: vec![None; n_attr],
        };
        for k in 0..n_attr {
            let size = table.vocab_size(k);
            if size <= DENSE_VOCAB_LIMIT {
                let mut cells = vec![0.0; size * size];
                for x in 0..size {
                    for y in 0..size {
                        if model.freq[k][x] > 0 && model.freq[k][y] > 0 {
                            cells[x * size + y] = model.compute_term(k, x as u32, y as u32);
                        }
                    }
                }
                model.dense[k] = Some(cells);
            }
        }
        model
    }

    pub fn table(&self) -> &AttributeTable {
        self.table
    }

    pub fn frequency(&self, attr: usize, value: u32) -> u32 {
        self.freq[attr][value as usize]
    }

    fn check(&self, attr: usize, values: [u32; 2]) -> Result<()> {
        if attr >= self.table.n_attributes() {
            return Err(Error::IndexOutOfRange {
                what: "attribute",
                index: attr,
                len: self.table.n_attributes(),
            });
        }
        for v in values {
            if v as usize >= self.freq[attr].len() || self.freq[attr][v as usize] == 0 {
                return Err(Error::Domain(format!(
                    "value {v} does not occur in attribute {}",
                    self.table.attribute_names()[attr]
                )));
            }
        }
        Ok(())
    }

    pub fn intra(&self, attr: usize, x: u32, y: u32) -> Result<f64> {
        self.check(attr, [x, y])?;
        Ok(self.intra_unchecked(attr, x, y))
    }

    pub fn inter(&self, attr: usize, x: u32, y: u32) -> Result<f64> {
        self.check(attr, [x, y])?;
        Ok(self.inter_unchecked(attr, x, y))
    }

    fn intra_unchecked(&self, attr: usize, x: u32, y: u32) -> f64 {
        let a = self.freq[attr][x as usize] as f64;
        let b = self.freq[attr][y as usize] as f64;
        a * b / (a + b + a * b)
    }

    fn inter_unchecked(&self, attr: usize, x: u32, y: u32) -> f64 {
        let n_attr = self.table.n_attributes();
        if n_attr == 1 || x == y {
            return 1.0;
        }
        let fx = self.freq[attr][x as usize] as f64;
        let fy = self.freq[attr][y as usize] as f64;
        let weight = 1.0 / (n_attr - 1) as f64;
        let lx = &self.cooc[attr][x as usize];
        let ly = &self.cooc[attr][y as usize];
        let mut total = 0.0;
        for j in (0..n_attr).filter(|&j| j != attr) {
            total += weight * overlap(&lx[j], fx, &ly[j], fy);
        }
        total
    }

    fn compute_term(&self, attr: usize, x: u32, y: u32) -> f64 {
        self.intra_unchecked(attr, x, y) * self.inter_unchecked(attr, x, y)
    }

    /// `intra · inter` for one attribute.
    pub fn term(&self, attr: usize, x: u32, y: u32) -> f64 {
        match &self.dense[attr] {
            Some(cells) => cells[x as usize * self.freq[attr].len() + y as usize],
            None => self.compute_term(attr, x, y),
        }
    }

    /// Coupled similarity of two value rows (both must come from this table).
    pub fn row_similarity(&self, a: &[u32], b: &[u32]) -> f64 {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(k, (&x, &y))| self.term(k, x, y))
            .sum()
    }

    /// Coupled similarity of entities `i` and `j`.
    pub fn similarity(&self, i: usize, j: usize) -> f64 {
        self.row_similarity(self.table.row(i), self.table.row(j))
    }
}

/// Sorts `(value, 1)` pairs and merges equal values into counts.
fn tally(mut list: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    list.sort_unstable_by_key(|p| p.0);
    let mut out: Vec<(u32, u32)> = Vec::new();
    for (w, c) in list {
        match out.last_mut() {
            Some(last) if last.0 == w => last.1 += c,
            _ => out.push((w, c)),
        }
    }
    out
}

/// `Σ_w min(cx(w)/fx, cy(w)/fy)` over values present in both lists.
fn overlap(lx: &[(u32, u32)], fx: f64, ly: &[(u32, u32)], fy: f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < lx.len() && j < ly.len() {
        match lx[i].0.cmp(&ly[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += (lx[i].1 as f64 / fx).min(ly[j].1 as f64 / fy);
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

pub fn intra_attribute_similarity(table: &AttributeTable, attr: usize, x: u32, y: u32) -> Result<f64> {
    CouplingModel::new(table).intra(attr, x, y)
}

pub fn inter_attribute_similarity(table: &AttributeTable, attr: usize, x: u32, y: u32) -> Result<f64> {
    CouplingModel::new(table).inter(attr, x, y)
}

/// One-off coupled similarity. Build a [`CouplingModel`] for repeated queries.
pub fn coupled_similarity(table: &AttributeTable, i: usize, j: usize) -> Result<f64> {
    for idx in [i, j] {
        if idx >= table.n_entities() {
            return Err(Error::IndexOutOfRange {
                what: "entity",
                index: idx,
                len: table.n_entities(),
            });
        }
    }
    Ok(CouplingModel::new(table).similarity(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;
    use approx::assert_abs_diff_eq;

    #[test]
    fn toy_intra_values() {
        let t = toy::items();
        let m = CouplingModel::new(&t);
        let dir = |s| t.lookup(0, s).unwrap();
        assert_abs_diff_eq!(m.intra(0, dir("Scorsese"), dir("Coppola")).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.intra(0, dir("Hitchcock"), dir("Hitchcock")).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.intra(0, dir("Scorsese"), dir("Hitchcock")).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn toy_inter_values() {
        let t = toy::items();
        let m = CouplingModel::new(&t);
        let dir = |s| t.lookup(0, s).unwrap();
        assert_abs_diff_eq!(m.inter(0, dir("Scorsese"), dir("Coppola")).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(m.inter(0, dir("Scorsese"), dir("Hitchcock")).unwrap(), 0.0);
        let actor = |s| t.lookup(1, s).unwrap();
        assert_abs_diff_eq!(m.inter(1, actor("Stewart"), actor("Grant")).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn toy_coupled_item_similarity() {
        let t = toy::items();
        assert_abs_diff_eq!(coupled_similarity(&t, 0, 1).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(coupled_similarity(&t, 2, 3).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(coupled_similarity(&t, 0, 2).unwrap(), 0.0);
        assert!(coupled_similarity(&t, 0, 9).is_err());
    }

    #[test]
    fn absent_value_is_domain_error() {
        let t = toy::items();
        // the missing sentinel never occurs in the toy table
        assert!(matches!(intra_attribute_similarity(&t, 0, 0, 1), Err(Error::Domain(_))));
        assert!(matches!(inter_attribute_similarity(&t, 2, 1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn single_attribute_inter_is_one() {
        let t = AttributeTable::from_rows(&["genre"], &[vec!["a"], vec!["b"], vec!["b"]]).unwrap();
        let m = CouplingModel::new(&t);
        assert_eq!(m.inter(0, 1, 2).unwrap(), 1.0);
        // intra with |g| = 1 and 2
        assert_abs_diff_eq!(m.similarity(0, 1), 2.0 / 5.0, epsilon = 1e-15);
    }

    #[test]
    fn frequency_one_pairs_give_one_third() {
        let rows: Vec<Vec<String>> = (0..20).map(|i| vec![format!("v{i}")]).collect();
        let t = AttributeTable::from_rows(&["a"], &rows).unwrap();
        let m = CouplingModel::new(&t);
        assert_abs_diff_eq!(m.intra(0, 3, 17).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }
}
