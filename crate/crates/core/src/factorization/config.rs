use std::fmt;
use std::str::FromStr;

use crate::coupling::SimilarityKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Coupled attribute similarities on both sides.
    Cmf,
    /// Regularized MF around the global mean.
    Pmf,
    /// Regularized MF without the global offset.
    Rsvd,
    /// Rating-Pearson neighborhoods.
    Ismf,
    /// One-hot Pearson attribute neighborhoods.
    Psmf,
    /// One-hot cosine attribute neighborhoods.
    Csmf,
    /// One-hot Jaccard attribute neighborhoods.
    Jsmf,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Cmf,
        Variant::Pmf,
        Variant::Rsvd,
        Variant::Ismf,
        Variant::Psmf,
        Variant::Csmf,
        Variant::Jsmf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Cmf => "CMF",
            Variant::Pmf => "PMF",
            Variant::Rsvd => "RSVD",
            Variant::Ismf => "ISMF",
            Variant::Psmf => "PSMF",
            Variant::Csmf => "CSMF",
            Variant::Jsmf => "JSMF",
        }
    }

    /// Similarity the neighbor graphs must be built with, if any.
    pub fn similarity(self) -> Option<SimilarityKind> {
        match self {
            Variant::Cmf => Some(SimilarityKind::Coupled),
            Variant::Ismf => Some(SimilarityKind::RatingPearson),
            Variant::Psmf => Some(SimilarityKind::Pearson),
            Variant::Csmf => Some(SimilarityKind::Cosine),
            Variant::Jsmf => Some(SimilarityKind::Jaccard),
            Variant::Pmf | Variant::Rsvd => None,
        }
    }

    pub fn uses_offset(self) -> bool {
        self != Variant::Rsvd
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub d: usize,
    pub lambda: f64,
    /// Weight of the user-neighborhood regularizer.
    pub alpha: f64,
    /// Weight of the item-neighborhood regularizer.
    pub beta: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the relative objective change drops below this.
    pub convergence_tol: f64,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            d: 10,
            lambda: 0.05,
            alpha: 0.0,
            beta: 0.0,
            learning_rate: 0.005,
            max_epochs: 200,
            convergence_tol: 1e-5,
            seed: 42,
            variant: Variant::Cmf,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be a finite value >= 0, got {x}")))
            }
        };
        if self.d == 0 {
            return Err(Error::Config("latent dimension d must be at least 1".into()));
        }
        nonneg("lambda", self.lambda)?;
        nonneg("alpha", self.alpha)?;
        nonneg("beta", self.beta)?;
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!("learning_rate must be > 0, got {}", self.learning_rate)));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::Config(format!("convergence_tol must be > 0, got {}", self.convergence_tol)));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be at least 1".into()));
        }
        Ok(())
    }

    /// User-side weight actually applied; zero for graph-free variants.
    pub fn effective_alpha(&self) -> f64 {
        if self.variant.similarity().is_some() {
            self.alpha
        } else {
            0.0
        }
    }

    pub fn effective_beta(&self) -> f64 {
        if self.variant.similarity().is_some() {
            self.beta
        } else {
            0.0
        }
    }

    /// One-line `key=value` summary.
    pub fn echo(&self) -> String {
        format!(
            "variant={} d={} lambda={} alpha={} beta={} learning_rate={} max_epochs={} convergence_tol={} seed={}",
            self.variant,
            self.d,
            self.lambda,
            self.alpha,
            self.beta,
            self.learning_rate,
            self.max_epochs,
            self.convergence_tol,
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn bounds_enforced() {
        let bad = [
            TrainConfig { d: 0, ..Default::default() },
            TrainConfig { lambda: -1.0, ..Default::default() },
            TrainConfig { alpha: f64::NAN, ..Default::default() },
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { convergence_tol: 0.0, ..Default::default() },
            TrainConfig { max_epochs: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn graph_free_variants_ignore_coupling_weights() {
        let cfg = TrainConfig { alpha: 1.0, beta: 0.2, variant: Variant::Pmf, ..Default::default() };
        assert_eq!((cfg.effective_alpha(), cfg.effective_beta()), (0.0, 0.0));
        let cfg = TrainConfig { variant: Variant::Cmf, ..cfg };
        assert_eq!((cfg.effective_alpha(), cfg.effective_beta()), (1.0, 0.2));
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("svd++".parse::<Variant>().is_err());
    }
}
