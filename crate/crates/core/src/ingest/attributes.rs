use std::collections::HashMap;

use crate::error::{Error, Result};

/// Value id reserved in every attribute for a missing value. Its label is the
/// empty string.
pub const MISSING_ID: u32 = 0;

/// Categorical attributes of one entity class (users or items).
///
/// Each attribute has a dense vocabulary `0..|V_j|` whose id 0 is the missing
/// sentinel; it is a regular category and couples like any other value.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    attribute_names: Vec<String>,
    n_entities: usize,
    /// Row-major `n_entities x n_attributes`.
    cells: Vec<u32>,
    vocab: Vec<Vec<String>>,
}

impl AttributeTable {
    /// Builds a table from string rows; empty strings are missing values.
    pub fn from_rows<S: AsRef<str>>(names: &[&str], rows: &[Vec<S>]) -> Result<Self> {
        let mut b = AttributeTableBuilder::new(names.iter().copied());
        for row in rows {
            b.push_row(row.iter().map(|s| Some(s.as_ref())))?;
        }
        Ok(b.build())
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn n_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attribute_names.iter().position(|n| n == name)
    }

    pub fn row(&self, entity: usize) -> &[u32] {
        let j = self.n_attributes();
        &self.cells[entity * j..(entity + 1) * j]
    }

    pub fn value(&self, entity: usize, attr: usize) -> u32 {
        self.cells[entity * self.n_attributes() + attr]
    }

    pub fn vocab(&self, attr: usize) -> &[String] {
        &self.vocab[attr]
    }

    pub fn vocab_size(&self, attr: usize) -> usize {
        self.vocab[attr].len()
    }

    pub fn label(&self, attr: usize, id: u32) -> &str {
        &self.vocab[attr][id as usize]
    }

    pub fn lookup(&self, attr: usize, label: &str) -> Option<u32> {
        self.vocab[attr].iter().position(|v| v == label).map(|i| i as u32)
    }

    pub fn missing_id(&self, _attr: usize) -> u32 {
        MISSING_ID
    }

    /// Column `attr` as value ids, one per entity.
    pub fn column(&self, attr: usize) -> impl Iterator<Item = u32> + '_ {
        (0..self.n_entities).map(move |e| self.value(e, attr))
    }
}

/// Interns string values row by row. Ids follow first appearance, after the
/// missing sentinel.
#[derive(Debug)]
pub struct AttributeTableBuilder {
    names: Vec<String>,
    cells: Vec<u32>,
    vocab: Vec<Vec<String>>,
    index: Vec<HashMap<String, u32>>,
    n_entities: usize,
}

impl AttributeTableBuilder {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let j = names.len();
        AttributeTableBuilder {
            names,
            cells: Vec::new(),
            vocab: vec![vec![String::new()]; j],
            index: vec![HashMap::new(); j],
            n_entities: 0,
        }
    }

    pub fn push_row<'a>(&mut self, values: impl IntoIterator<Item = Option<&'a str>>) -> Result<()> {
        let start = self.cells.len();
        for (attr, value) in values.into_iter().enumerate() {
            if attr >= self.names.len() {
                self.cells.truncate(start);
                return Err(Error::Argument(format!(
                    "row has more than {} attribute values",
                    self.names.len()
                )));
            }
            let id = match value {
                None => MISSING_ID,
                Some(v) if v.is_empty() => MISSING_ID,
                Some(v) => self.intern(attr, v),
            };
            self.cells.push(id);
        }
        let got = self.cells.len() - start;
        if got != self.names.len() {
            self.cells.truncate(start);
            return Err(Error::Argument(format!(
                "row has {got} attribute values, expected {}",
                self.names.len()
            )));
        }
        self.n_entities += 1;
        Ok(())
    }

    fn intern(&mut self, attr: usize, v: &str) -> u32 {
        if let Some(&id) = self.index[attr].get(v) {
            return id;
        }
        let id = self.vocab[attr].len() as u32;
        self.vocab[attr].push(v.to_string());
        self.index[attr].insert(v.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.n_entities
    }

    pub fn is_empty(&self) -> bool {
        self.n_entities == 0
    }

    pub fn build(self) -> AttributeTable {
        AttributeTable {
            attribute_names: self.names,
            n_entities: self.n_entities,
            cells: self.cells,
            vocab: self.vocab,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_dense_with_missing_first() {
        let t = AttributeTable::from_rows(
            &["g", "a"],
            &[vec!["F", "1"], vec!["M", ""], vec!["F", "25"]],
        )
        .unwrap();
        assert_eq!(t.vocab(0), &["", "F", "M"]);
        assert_eq!(t.vocab(1), &["", "1", "25"]);
        assert_eq!(t.row(1), &[2, MISSING_ID]);
        assert_eq!(t.lookup(1, "25"), Some(2));
        assert_eq!(t.column(0).collect::<Vec<_>>(), vec![1, 2, 1]);
    }

    #[test]
    fn wrong_arity_rejected() {
        let mut b = AttributeTableBuilder::new(["x", "y"]);
        assert!(b.push_row([Some("a")]).is_err());
        assert!(b.push_row([Some("a"), Some("b"), Some("c")]).is_err());
        b.push_row([Some("a"), None]).unwrap();
        assert_eq!(b.build().n_entities(), 1);
    }
}
