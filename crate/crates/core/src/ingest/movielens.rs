use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::text::{file_name, read_latin1};
use super::{AttributeTable, AttributeTableBuilder, IngestSummary, Ingested, Rating, RatingDataset};
use crate::error::{Error, Result};
use crate::fmt::format_significant;

pub const USER_ATTRIBUTES: [&str; 4] = ["gender", "age", "occupation", "zipcode"];
pub const ITEM_ATTRIBUTES: [&str; 1] = ["genre"];

#[derive(Debug, Clone, Default)]
pub struct MovieLensOptions {
    /// Keep only the first N rating lines (file order).
    pub max_ratings: Option<usize>,
}

/// Parses a MovieLens-1M directory (`users.dat`, `movies.dat`, `ratings.dat`).
pub fn parse_movielens(dir: &Path) -> Result<Ingested> {
    parse_movielens_with(dir, &MovieLensOptions::default())
}

pub fn parse_movielens_with(dir: &Path, opts: &MovieLensOptions) -> Result<Ingested> {
    let users_path = dir.join("users.dat");
    let movies_path = dir.join("movies.dat");
    let ratings_path = dir.join("ratings.dat");

    // UserID::Gender::Age::Occupation::Zip-code
    let mut user_ids = Vec::new();
    let mut user_index = HashMap::new();
    let mut users = AttributeTableBuilder::new(USER_ATTRIBUTES);
    let fname = file_name(&users_path);
    for (line_no, fields) in records(&read_latin1(&users_path)?, 5, &fname)? {
        let id = fields[0].to_string();
        if user_index.insert(id.clone(), user_ids.len()).is_some() {
            return Err(Error::parse(&fname, line_no, format!("duplicate user id {id}")));
        }
        user_ids.push(id);
        users.push_row(fields[1..].iter().map(|s| Some(*s)))?;
    }

    // MovieID::Title::Genres
    let mut item_ids = Vec::new();
    let mut item_index = HashMap::new();
    let mut items = AttributeTableBuilder::new(ITEM_ATTRIBUTES);
    let fname = file_name(&movies_path);
    for (line_no, fields) in records(&read_latin1(&movies_path)?, 3, &fname)? {
        let id = fields[0].to_string();
        if item_index.insert(id.clone(), item_ids.len()).is_some() {
            return Err(Error::parse(&fname, line_no, format!("duplicate movie id {id}")));
        }
        item_ids.push(id);
        items.push_row([Some(fields[2])])?;
    }

    // UserID::MovieID::Rating::Timestamp
    let fname = file_name(&ratings_path);
    let text = read_latin1(&ratings_path)?;
    let mut summary = IngestSummary::default();
    let mut entries: Vec<Rating> = Vec::new();
    let mut position: HashMap<(usize, usize), usize> = HashMap::new();
    for (line_no, fields) in records(&text, 4, &fname)? {
        if opts.max_ratings.is_some_and(|m| summary.raw_rating_rows >= m) {
            break;
        }
        summary.raw_rating_rows += 1;
        let referential = |what: &str, id: &str| Error::Referential {
            file: fname.clone(),
            line: line_no,
            message: format!("unknown {what} id {id}"),
        };
        let user = *user_index.get(fields[0]).ok_or_else(|| referential("user", fields[0]))?;
        let item = *item_index.get(fields[1]).ok_or_else(|| referential("movie", fields[1]))?;
        let value: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(&fname, line_no, format!("bad rating {:?}", fields[2])))?;
        if !(1.0..=5.0).contains(&value) {
            return Err(Error::parse(&fname, line_no, format!("rating {value} outside [1,5]")));
        }
        match position.get(&(user, item)) {
            Some(&at) => {
                summary.duplicates += 1;
                entries[at].value = value;
            }
            None => {
                position.insert((user, item), entries.len());
                entries.push(Rating { user, item, value });
            }
        }
    }

    let ratings = RatingDataset::new(user_ids, item_ids, entries, (1.0, 5.0))?;
    Ok(Ingested {
        name: "movielens".into(),
        ratings,
        users: users.build(),
        items: items.build(),
        summary,
    })
}

/// Splits `::`-delimited lines, skipping blank ones, with 1-based line numbers.
fn records<'a>(text: &'a str, arity: usize, file: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split("::").collect();
        if fields.len() != arity {
            return Err(Error::parse(
                file,
                i + 1,
                format!("expected {arity} '::'-separated fields, found {}", fields.len()),
            ));
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

/// Writes tables back in MovieLens-1M layout. Timestamps are written as 0 and
/// titles are synthesized, since neither is kept after parsing.
pub fn write_movielens(
    dir: &Path,
    ratings: &RatingDataset,
    users: &AttributeTable,
    items: &AttributeTable,
) -> Result<()> {
    for (table, names) in [(users, &USER_ATTRIBUTES[..]), (items, &ITEM_ATTRIBUTES[..])] {
        if table.attribute_names() != names {
            return Err(Error::Argument(format!(
                "expected attributes {names:?}, found {:?}",
                table.attribute_names()
            )));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut out = String::new();
    for (u, id) in ratings.user_ids().iter().enumerate() {
        let row = users.row(u);
        let _ = writeln!(
            out,
            "{id}::{}::{}::{}::{}",
            users.label(0, row[0]),
            users.label(1, row[1]),
            users.label(2, row[2]),
            users.label(3, row[3])
        );
    }
    write_latin1(&dir.join("users.dat"), &out)?;

    out.clear();
    for (i, id) in ratings.item_ids().iter().enumerate() {
        let _ = writeln!(out, "{id}::Movie {id}::{}", items.label(0, items.value(i, 0)));
    }
    write_latin1(&dir.join("movies.dat"), &out)?;

    out.clear();
    for r in ratings.entries() {
        let _ = writeln!(
            out,
            "{}::{}::{}::0",
            ratings.user_ids()[r.user],
            ratings.item_ids()[r.item],
            format_significant(r.value, 17)
        );
    }
    write_latin1(&dir.join("ratings.dat"), &out)
}

fn write_latin1(path: &Path, text: &str) -> Result<()> {
    let bytes: Vec<u8> = text
        .chars()
        .map(|c| u8::try_from(c as u32).unwrap_or(b'?'))
        .collect();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
