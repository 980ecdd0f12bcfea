use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::discretize::{bin_label, discretize_numeric};
use super::text::{file_name, read_latin1, sanitize};
use super::{AttributeTableBuilder, IngestSummary, Ingested, Rating, RatingDataset};
use crate::error::{Error, Result};

pub const USER_ATTRIBUTES: [&str; 2] = ["age", "country"];
pub const ITEM_ATTRIBUTES: [&str; 3] = ["author", "year", "publisher"];

/// Parses the BookCrossing dump (`BX-Users.csv`, `BX-Books.csv`,
/// `BX-Book-Ratings.csv`; `;`-separated, quoted, ISO-8859-1).
///
/// Only explicit ratings (1..=10) are kept. Ratings of ISBNs missing from the
/// books file, or of users missing from the users file, are dropped and
/// counted in the summary.
pub fn parse_bookcrossing(dir: &Path) -> Result<Ingested> {
    let mut summary = IngestSummary::default();
    summary.notes.push(
        "user gender is not present in BX-Users.csv; user attributes are binned age and location country"
            .into(),
    );
    log::info!("{}", summary.notes[0]);

    // "User-ID";"Location";"Age"
    let users_path = dir.join("BX-Users.csv");
    let mut user_ids = Vec::new();
    let mut user_index = HashMap::new();
    let mut ages = Vec::new();
    let mut countries = Vec::new();
    for (line, rec) in read_records(&users_path, 3)? {
        let id = rec[0].trim().to_string();
        if user_index.insert(id.clone(), user_ids.len()).is_some() {
            return Err(Error::parse(&file_name(&users_path), line, format!("duplicate user {id}")));
        }
        user_ids.push(id);
        ages.push(rec[2].trim().parse::<f64>().ok());
        countries.push(country_of(&rec[1]));
    }
    let age_edges: Vec<f64> = (0..=10).map(|d| d as f64 * 10.0).collect();
    let age_bins = discretize_numeric(&ages, &age_edges)?;
    let mut users = AttributeTableBuilder::new(USER_ATTRIBUTES);
    for (bin, country) in age_bins.iter().zip(&countries) {
        let age = bin.map(|b| bin_label(&age_edges, b));
        users.push_row([age.as_deref(), Some(country.as_str())])?;
    }

    // "ISBN";"Book-Title";"Book-Author";"Year-Of-Publication";"Publisher";"Image-URL-S";"Image-URL-M";"Image-URL-L"
    let books_path = dir.join("BX-Books.csv");
    let mut item_ids = Vec::new();
    let mut item_index = HashMap::new();
    let mut years = Vec::new();
    let mut authors = Vec::new();
    let mut publishers = Vec::new();
    for (_, rec) in read_records(&books_path, 8)? {
        let isbn = normalize_isbn(&rec[0]);
        if item_index.contains_key(&isbn) {
            continue;
        }
        item_index.insert(isbn.clone(), item_ids.len());
        item_ids.push(isbn);
        authors.push(sanitize(&rec[2]));
        years.push(rec[3].trim().parse::<f64>().ok().filter(|&y| y > 0.0));
        publishers.push(sanitize(&rec[4]));
    }
    let year_edges: Vec<f64> = (0..=11).map(|d| 1900.0 + d as f64 * 10.0).collect();
    let year_bins = discretize_numeric(&years, &year_edges)?;
    let mut items = AttributeTableBuilder::new(ITEM_ATTRIBUTES);
    for i in 0..item_ids.len() {
        let year = year_bins[i].map(|b| bin_label(&year_edges, b));
        items.push_row([Some(authors[i].as_str()), year.as_deref(), Some(publishers[i].as_str())])?;
    }

    // "User-ID";"ISBN";"Book-Rating"
    let ratings_path = dir.join("BX-Book-Ratings.csv");
    let rfile = file_name(&ratings_path);
    let mut entries: Vec<Rating> = Vec::new();
    let mut position: HashMap<(usize, usize), usize> = HashMap::new();
    let mut unknown_isbns = HashSet::new();
    for (line, rec) in read_records(&ratings_path, 3)? {
        summary.raw_rating_rows += 1;
        let value: f64 = rec[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(&rfile, line, format!("bad rating {:?}", rec[2])))?;
        if value == 0.0 {
            summary.dropped_implicit += 1;
            continue;
        }
        if !(1.0..=10.0).contains(&value) {
            return Err(Error::parse(&rfile, line, format!("rating {value} outside [0,10]")));
        }
        let isbn = normalize_isbn(&rec[1]);
        let Some(&item) = item_index.get(&isbn) else {
            summary.dropped_unknown_item += 1;
            unknown_isbns.insert(isbn);
            continue;
        };
        let Some(&user) = user_index.get(rec[0].trim()) else {
            summary.dropped_unknown_user += 1;
            continue;
        };
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
    log::info!(
        "bookcrossing: {} raw rating rows, {} retained ({} implicit, {} ratings of {} unknown ISBNs, {} unknown users dropped)",
        summary.raw_rating_rows,
        entries.len(),
        summary.dropped_implicit,
        summary.dropped_unknown_item,
        unknown_isbns.len(),
        summary.dropped_unknown_user
    );

    let ratings = RatingDataset::new(user_ids, item_ids, entries, (1.0, 10.0))?;
    Ok(Ingested {
        name: "bookcrossing".into(),
        ratings,
        users: users.build(),
        items: items.build(),
        summary,
    })
}

/// Last comma-separated component of a "city, state, country" location.
fn country_of(location: &str) -> String {
    let last = location.rsplit(',').next().unwrap_or("");
    let c = sanitize(last).to_lowercase();
    if c == "n/a" {
        String::new()
    } else {
        c
    }
}

fn normalize_isbn(raw: &str) -> String {
    raw.trim().to_uppercase()
}

/// Header-skipping record reader returning (1-based line, fields).
fn read_records(path: &Path, arity: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let text = read_latin1(path)?;
    let file = file_name(path);
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(true)
        .double_quote(true)
        .escape(Some(b'\\'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(&file, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != arity {
            return Err(Error::parse(
                &file,
                line,
                format!("expected {arity} fields, found {}", rec.len()),
            ));
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const USERS: &str = "\"User-ID\";\"Location\";\"Age\"\n\"276725\";\"tyler, texas, usa\";NULL\n\"276726\";\"seattle, washington, usa\";\"34\"\n\"276727\";\"rijeka, n/a, croatia\";\"999\"\n";
    const BOOKS: &str = "\"ISBN\";\"Book-Title\";\"Book-Author\";\"Year-Of-Publication\";\"Publisher\";\"Image-URL-S\";\"Image-URL-M\";\"Image-URL-L\"\n\"034545104X\";\"Flesh Tones: A Novel\";\"M. J. Rose\";\"2002\";\"Ballantine Books\";\"s\";\"m\";\"l\"\n\"0155061224\";\"Rites of Passage\";\"Judith Rae\";\"2001\";\"Heinle\";\"s\";\"m\";\"l\"\n\"0446520802\";\"The Notebook \"\"Special\"\"\";\"Nicholas Sparks\";\"0\";\"Warner Books\";\"s\";\"m\";\"l\"\n";

    fn write_dir(ratings: &str) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("BX-Users.csv"), USERS).unwrap();
        std::fs::write(dir.path().join("BX-Books.csv"), BOOKS).unwrap();
        std::fs::write(dir.path().join("BX-Book-Ratings.csv"), ratings).unwrap();
        dir
    }

    const HEADER: &str = "\"User-ID\";\"ISBN\";\"Book-Rating\"\n";

    #[test]
    fn implicit_ratings_dropped() {
        let dir = write_dir(&format!("{HEADER}\"276725\";\"034545104X\";\"0\"\n\"276726\";\"0155061224\";\"0\"\n"));
        let ing = parse_bookcrossing(dir.path()).unwrap();
        assert_eq!(ing.ratings.len(), 0);
        assert_eq!(ing.summary.raw_rating_rows, 2);
        assert_eq!(ing.summary.dropped_implicit, 2);
    }

    #[test]
    fn explicit_rating_kept() {
        let dir = write_dir(&format!("{HEADER}\"276725\";\"034545104X\";\"0\"\n\"276726\";\"0155061224\";\"5\"\n"));
        let ing = parse_bookcrossing(dir.path()).unwrap();
        assert_eq!(ing.ratings.len(), 1);
        let r = ing.ratings.entries()[0];
        assert_eq!((r.user, r.item, r.value), (1, 1, 5.0));
        assert_eq!(ing.ratings.scale(), (1.0, 10.0));
    }

    #[test]
    fn unknown_isbn_dropped() {
        let dir = write_dir(&format!("{HEADER}\"276726\";\"9999999999\";\"7\"\n\"276726\";\"0155061224\";\"5\"\n"));
        let ing = parse_bookcrossing(dir.path()).unwrap();
        assert_eq!(ing.ratings.len(), 1);
        assert_eq!(ing.summary.dropped_unknown_item, 1);
        assert!(ing.ratings.len() < ing.summary.raw_rating_rows);
    }

    #[test]
    fn attributes_binned_and_derived() {
        let dir = write_dir(HEADER);
        let ing = parse_bookcrossing(dir.path()).unwrap();
        let u = &ing.users;
        // NULL age, 34, 999
        assert_eq!(u.label(0, u.value(0, 0)), "");
        assert_eq!(u.label(0, u.value(1, 0)), "[30,40)");
        assert_eq!(u.label(0, u.value(2, 0)), "");
        assert_eq!(u.label(1, u.value(0, 1)), "usa");
        assert_eq!(u.label(1, u.value(2, 1)), "croatia");
        let b = &ing.items;
        assert_eq!(b.label(1, b.value(0, 1)), "[2000,2010)");
        assert_eq!(b.label(1, b.value(2, 1)), "");
        assert_eq!(b.label(0, b.value(2, 0)), "Nicholas Sparks");
        assert_eq!(ing.ratings.n_items(), 3);
    }

    #[test]
    fn backslash_escaped_quotes_tolerated() {
        let books = format!("{BOOKS}\"0000000001\";\"A \\\"quoted\\\" title\";\"X\";\"1999\";\"P\";\"s\";\"m\";\"l\"\n");
        let dir = write_dir(HEADER);
        std::fs::write(dir.path().join("BX-Books.csv"), books).unwrap();
        let ing = parse_bookcrossing(dir.path()).unwrap();
        assert_eq!(ing.ratings.n_items(), 4);
    }

    #[test]
    fn wrong_field_count_is_parse_error() {
        let dir = write_dir(&format!("{HEADER}\"276726\";\"0155061224\"\n"));
        match parse_bookcrossing(dir.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nul_byte_is_decode_error() {
        let dir = write_dir(&format!("{HEADER}\"27\0\";\"0155061224\";\"5\"\n"));
        assert!(matches!(parse_bookcrossing(dir.path()), Err(Error::Decode { .. })));
    }
}
