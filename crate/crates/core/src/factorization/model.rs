use std::fmt::Write as _;

use super::Variant;
use crate::error::{Error, Result};
use crate::fmt::format_significant;

/// Latent user matrix `P` (n x d), item matrix `Q` (m x d) and offset `r_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub(crate) n_users: usize,
    pub(crate) n_items: usize,
    pub(crate) d: usize,
    /// Row-major `n_users x d`.
    pub(crate) p: Vec<f64>,
    /// Row-major `n_items x d`.
    pub(crate) q: Vec<f64>,
    pub(crate) offset: f64,
    pub(crate) scale: (f64, f64),
    pub(crate) variant: Variant,
    pub(crate) config: String,
}

impl FactorModel {
    pub fn new(
        p: Vec<f64>,
        q: Vec<f64>,
        d: usize,
        offset: f64,
        scale: (f64, f64),
        variant: Variant,
    ) -> Result<Self> {
        if d == 0 || !p.len().is_multiple_of(d) || !q.len().is_multiple_of(d) {
            return Err(Error::Argument(format!(
                "factor lengths {} and {} are not multiples of d={d}",
                p.len(),
                q.len()
            )));
        }
        Ok(FactorModel {
            n_users: p.len() / d,
            n_items: q.len() / d,
            d,
            p,
            q,
            offset,
            scale,
            variant,
            config: String::new(),
        })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scale(&self) -> (f64, f64) {
        self.scale
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn config_echo(&self) -> &str {
        &self.config
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn user_factors(&self, u: usize) -> &[f64] {
        &self.p[u * self.d..(u + 1) * self.d]
    }

    pub fn item_factors(&self, i: usize) -> &[f64] {
        &self.q[i * self.d..(i + 1) * self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(&self.q).all(|x| x.is_finite())
    }

    /// `r_m + P_u·Q_i`, optionally clamped to the rating scale.
    pub fn predict(&self, u: usize, i: usize, clamp: bool) -> Result<f64> {
        if u >= self.n_users {
            return Err(Error::IndexOutOfRange { what: "user", index: u, len: self.n_users });
        }
        if i >= self.n_items {
            return Err(Error::IndexOutOfRange { what: "item", index: i, len: self.n_items });
        }
        let raw = self.predict_raw(u, i);
        Ok(if clamp { raw.clamp(self.scale.0, self.scale.1) } else { raw })
    }

    pub(crate) fn predict_raw(&self, u: usize, i: usize) -> f64 {
        self.offset + dot(self.user_factors(u), self.item_factors(i))
    }

    /// Plain-text form: a tab-separated header, then `P` rows, then `Q`
    /// rows, every value with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cmf-model\t1");
        let _ = writeln!(out, "n_users\t{}", self.n_users);
        let _ = writeln!(out, "n_items\t{}", self.n_items);
        let _ = writeln!(out, "d\t{}", self.d);
        let _ = writeln!(out, "r_m\t{}", format_significant(self.offset, 17));
        let _ = writeln!(out, "scale_min\t{}", format_significant(self.scale.0, 17));
        let _ = writeln!(out, "scale_max\t{}", format_significant(self.scale.1, 17));
        let _ = writeln!(out, "variant\t{}", self.variant);
        let _ = writeln!(out, "config\t{}", self.config);
        for (tag, data) in [("P", &self.p), ("Q", &self.q)] {
            let _ = writeln!(out, "{tag}");
            for row in data.chunks(self.d) {
                let cells: Vec<String> = row.iter().map(|&x| format_significant(x, 17)).collect();
                let _ = writeln!(out, "{}", cells.join("\t"));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        const FILE: &str = "model";
        let mut lines = text.lines().enumerate();
        let mut header = |key: &str| -> Result<String> {
            let (n, line) = lines.next().ok_or_else(|| Error::parse(FILE, 0, "truncated header"))?;
            let (k, v) = line.split_once('\t').ok_or_else(|| Error::parse(FILE, n + 1, "expected key<TAB>value"))?;
            if k != key {
                return Err(Error::parse(FILE, n + 1, format!("expected {key}, found {k}")));
            }
            Ok(v.to_string())
        };
        let num = |s: String, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::parse(FILE, 0, format!("bad {what}: {s:?}")))
        };
        let count = |s: String, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(FILE, 0, format!("bad {what}: {s:?}")))
        };
        if header("cmf-model")? != "1" {
            return Err(Error::parse(FILE, 1, "unsupported model version"));
        }
        let n_users = count(header("n_users")?, "n_users")?;
        let n_items = count(header("n_items")?, "n_items")?;
        let d = count(header("d")?, "d")?;
        let offset = num(header("r_m")?, "r_m")?;
        let lo = num(header("scale_min")?, "scale_min")?;
        let hi = num(header("scale_max")?, "scale_max")?;
        let variant: Variant = header("variant")?.parse()?;
        let config = header("config")?;

        let rest: Vec<(usize, &str)> = lines.collect();
        let read_block = |tag: &str, rows: usize, at: &mut usize| -> Result<Vec<f64>> {
            let (n, line) = rest.get(*at).copied().ok_or_else(|| Error::parse(FILE, 0, format!("missing {tag} block")))?;
            if line != tag {
                return Err(Error::parse(FILE, n + 1, format!("expected {tag}")));
            }
            *at += 1;
            let mut data = Vec::with_capacity(rows * d);
            for _ in 0..rows {
                let (n, line) = rest.get(*at).copied().ok_or_else(|| Error::parse(FILE, 0, format!("truncated {tag} block")))?;
                *at += 1;
                let before = data.len();
                for cell in line.split('\t') {
                    data.push(cell.parse().map_err(|_| Error::parse(FILE, n + 1, format!("bad value {cell:?}")))?);
                }
                if data.len() - before != d {
                    return Err(Error::parse(FILE, n + 1, format!("expected {d} values")));
                }
            }
            Ok(data)
        };
        let mut at = 0;
        let p = read_block("P", n_users, &mut at)?;
        let q = read_block("Q", n_items, &mut at)?;
        let mut model = FactorModel::new(p, q, d, offset, (lo, hi), variant)?;
        model.n_users = n_users;
        model.n_items = n_items;
        model.config = config;
        Ok(model)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
