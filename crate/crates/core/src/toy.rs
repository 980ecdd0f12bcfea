//! The three-user, four-movie example used throughout the tests and the demo.
//!
//! | movie       | director  | actor   | genre    |
//! |-------------|-----------|---------|----------|
//! | God Father  | Scorsese  | De Niro | Crime    |
//! | Good Fellas | Coppola   | De Niro | Crime    |
//! | Vertigo     | Hitchcock | Stewart | Thriller |
//! | N by NW     | Hitchcock | Grant   | Thriller |

use crate::ingest::{AttributeTable, Rating, RatingDataset};

pub const MOVIES: [&str; 4] = ["God Father", "Good Fellas", "Vertigo", "N by NW"];
pub const USERS: [&str; 3] = ["u1", "u2", "u3"];

pub fn items() -> AttributeTable {
    AttributeTable::from_rows(
        &["Director", "Actor", "Genre"],
        &[
            vec!["Scorsese", "De Niro", "Crime"],
            vec!["Coppola", "De Niro", "Crime"],
            vec!["Hitchcock", "Stewart", "Thriller"],
            vec!["Hitchcock", "Grant", "Thriller"],
        ],
    )
    .expect("static table")
}

pub fn users() -> AttributeTable {
    AttributeTable::from_rows(
        &["Age", "ZipCode", "Country", "Sex"],
        &[
            vec!["20", "10081", "China", "M"],
            vec!["40", "2007", "Australia", "F"],
            vec!["20", "2008", "Australia", "M"],
        ],
    )
    .expect("static table")
}

pub fn ratings() -> RatingDataset {
    let grid: [[Option<f64>; 4]; 3] = [
        [Some(1.0), Some(3.0), Some(5.0), Some(4.0)],
        [Some(4.0), Some(2.0), Some(1.0), Some(5.0)],
        [None, Some(2.0), None, Some(4.0)],
    ];
    let mut entries = Vec::new();
    for (user, row) in grid.iter().enumerate() {
        for (item, v) in row.iter().enumerate() {
            if let Some(value) = *v {
                entries.push(Rating { user, item, value });
            }
        }
    }
    RatingDataset::new(
        USERS.iter().map(|s| s.to_string()).collect(),
        MOVIES.iter().map(|s| s.to_string()).collect(),
        entries,
        (1.0, 5.0),
    )
    .expect("static ratings")
}
