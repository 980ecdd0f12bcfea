//! Tab-separated files exchanged between pipeline stages.
//!
//! A prepared directory holds `dataset.tsv` (key/value metadata),
//! `ratings.tsv` (`user`, `item`, `rating` by 0-based index) and
//! `users.tsv` / `items.tsv` (`index`, `id`, one column per attribute; an empty
//! cell is the missing value). Every file starts with a header row.

use std::fmt::Write as _;
use std::path::Path;

use super::{AttributeTable, AttributeTableBuilder, Rating, RatingDataset};
use crate::error::{Error, Result};
use crate::fmt::format_significant;

pub const DATASET_FILE: &str = "dataset.tsv";
pub const RATINGS_FILE: &str = "ratings.tsv";
pub const USERS_FILE: &str = "users.tsv";
pub const ITEMS_FILE: &str = "items.tsv";

/// The three tables of a dataset plus its name.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub name: String,
    pub ratings: RatingDataset,
    pub users: AttributeTable,
    pub items: AttributeTable,
}

pub fn write_prepared(dir: &Path, p: &Prepared) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ds = &p.ratings;
    let (lo, hi) = ds.scale();

    let mut meta = String::from("key\tvalue\n");
    let _ = writeln!(meta, "name\t{}", p.name);
    let _ = writeln!(meta, "scale_min\t{}", format_significant(lo, 17));
    let _ = writeln!(meta, "scale_max\t{}", format_significant(hi, 17));
    let _ = writeln!(meta, "n_users\t{}", ds.n_users());
    let _ = writeln!(meta, "n_items\t{}", ds.n_items());
    let _ = writeln!(meta, "n_ratings\t{}", ds.len());
    write(&dir.join(DATASET_FILE), &meta)?;

    let mut out = String::with_capacity(ds.len() * 16);
    out.push_str("user\titem\trating\n");
    for r in ds.entries() {
        let _ = writeln!(out, "{}\t{}\t{}", r.user, r.item, format_significant(r.value, 17));
    }
    write(&dir.join(RATINGS_FILE), &out)?;

    write(&dir.join(USERS_FILE), &table_text(&p.users, ds.user_ids())?)?;
    write(&dir.join(ITEMS_FILE), &table_text(&p.items, ds.item_ids())?)
}

fn table_text(table: &AttributeTable, ids: &[String]) -> Result<String> {
    if table.n_entities() != ids.len() {
        return Err(Error::Argument(format!(
            "attribute table has {} rows for {} ids",
            table.n_entities(),
            ids.len()
        )));
    }
    let mut out = String::from("index\tid");
    for name in table.attribute_names() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (e, id) in ids.iter().enumerate() {
        let _ = write!(out, "{e}\t{id}");
        for (a, &v) in table.row(e).iter().enumerate() {
            out.push('\t');
            out.push_str(table.label(a, v));
        }
        out.push('\n');
    }
    Ok(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_prepared(dir: &Path) -> Result<Prepared> {
    let meta_path = dir.join(DATASET_FILE);
    let meta = read(&meta_path)?;
    let mut name = None;
    let mut scale = (None, None);
    for (line, fields) in rows(&meta, DATASET_FILE, Some(2))? {
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(DATASET_FILE, line, format!("bad number {s:?}")))
        };
        match fields[0] {
            "name" => name = Some(fields[1].to_string()),
            "scale_min" => scale.0 = Some(num(fields[1])?),
            "scale_max" => scale.1 = Some(num(fields[1])?),
            _ => {}
        }
    }
    let (Some(name), (Some(lo), Some(hi))) = (name, scale) else {
        return Err(Error::parse(DATASET_FILE, 1, "missing name or scale"));
    };

    let (user_ids, users) = read_table(&dir.join(USERS_FILE), USERS_FILE)?;
    let (item_ids, items) = read_table(&dir.join(ITEMS_FILE), ITEMS_FILE)?;

    let text = read(&dir.join(RATINGS_FILE))?;
    let mut entries = Vec::new();
    for (line, f) in rows(&text, RATINGS_FILE, Some(3))? {
        let bad = |what: &str| Error::parse(RATINGS_FILE, line, format!("bad {what}"));
        entries.push(Rating {
            user: f[0].parse().map_err(|_| bad("user index"))?,
            item: f[1].parse().map_err(|_| bad("item index"))?,
            value: f[2].parse().map_err(|_| bad("rating"))?,
        });
    }
    let ratings = RatingDataset::new(user_ids, item_ids, entries, (lo, hi))?;
    Ok(Prepared {
        name,
        ratings,
        users,
        items,
    })
}

fn read_table(path: &Path, file: &str) -> Result<(Vec<String>, AttributeTable)> {
    let text = read(path)?;
    let header = text
        .lines()
        .next()
        .ok_or_else(|| Error::parse(file, 1, "empty file"))?;
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < 2 || cols[0] != "index" || cols[1] != "id" {
        return Err(Error::parse(file, 1, "header must start with index, id"));
    }
    let mut builder = AttributeTableBuilder::new(cols[2..].iter().copied());
    let mut ids = Vec::new();
    for (line, f) in rows(&text, file, Some(cols.len()))? {
        if f[0].parse::<usize>().ok() != Some(ids.len()) {
            return Err(Error::parse(file, line, "rows must be in index order"));
        }
        ids.push(f[1].to_string());
        builder.push_row(f[2..].iter().map(|s| Some(*s)))?;
    }
    Ok((ids, builder.build()))
}

/// Data rows after the header, with 1-based line numbers.
fn rows<'a>(text: &'a str, file: &str, arity: Option<usize>) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if let Some(n) = arity {
            if f.len() != n {
                return Err(Error::parse(file, i + 1, format!("expected {n} fields, found {}", f.len())));
            }
        }
        out.push((i + 1, f));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;

    #[test]
    fn round_trip_is_exact() {
        let p = Prepared {
            name: "toy".into(),
            ratings: toy::ratings(),
            users: toy::users(),
            items: toy::items(),
        };
        let dir = tempfile::tempdir().unwrap();
        write_prepared(dir.path(), &p).unwrap();
        let back = read_prepared(dir.path()).unwrap();
        assert_eq!(p, back);

        // writing again is byte-identical
        let first = std::fs::read(dir.path().join(ITEMS_FILE)).unwrap();
        write_prepared(dir.path(), &back).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join(ITEMS_FILE)).unwrap());
    }
}
