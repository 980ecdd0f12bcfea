use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factorization::Variant;

/// Anything the experiment runner can score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mf(Variant),
    Ubcf,
    Ibcf,
    /// Predicts the training mean for every cell.
    GlobalMean,
}

impl Method {
    /// Every method in the usual table order.
    pub fn all() -> Vec<Method> {
        let mut out: Vec<Method> = Variant::ALL.into_iter().map(Method::Mf).collect();
        out.extend([Method::Ubcf, Method::Ibcf, Method::GlobalMean]);
        out
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mf(v) => v.as_str(),
            Method::Ubcf => "UBCF",
            Method::Ibcf => "IBCF",
            Method::GlobalMean => "MEAN",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            Method::Mf(v) => Some(v),
            _ => None,
        }
    }

    /// Parses a comma-separated list such as `CMF,PMF,UBCF`.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let out: Vec<Method> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(Error::Config("empty method list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::all()
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for m in Method::all() {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!("cmf".parse::<Method>().unwrap(), Method::Mf(Variant::Cmf));
        assert!("SVD++".parse::<Method>().is_err());
        assert_eq!(Method::parse_list("PMF, CMF").unwrap().len(), 2);
        assert!(Method::parse_list(" , ").is_err());
    }
}
