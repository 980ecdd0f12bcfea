//! `key = value` run configuration files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cmf_core::evaluation::Method;
use cmf_core::factorization::{TrainConfig, Variant};

pub const KEYS: [&str; 18] = [
    "d",
    "lambda",
    "alpha",
    "beta",
    "learning_rate",
    "max_epochs",
    "convergence_tol",
    "seed",
    "variant",
    "k",
    "normalize",
    "folds",
    "methods",
    "target",
    "data",
    "out_dir",
    "user_graph",
    "item_graph",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub k: usize,
    pub normalize: bool,
    pub folds: usize,
    pub methods: Vec<Method>,
    pub target: Option<Method>,
    pub data: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub user_graph: Option<PathBuf>,
    pub item_graph: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: TrainConfig::default(),
            k: 50,
            normalize: true,
            folds: 5,
            methods: vec![Method::Mf(Variant::Cmf), Method::Mf(Variant::Pmf)],
            target: None,
            data: None,
            out_dir: None,
            user_graph: None,
            item_graph: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("line {line}: bad value {value:?} for {key}: {e}"))
}

impl RunConfig {
    /// Parses config text. Relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                bail!("line {line}: expected key = value");
            };
            let (key, value) = (key.trim(), value.trim());
            let path = || base.join(value);
            match key {
                "d" => cfg.train.d = parse(key, value, line)?,
                "lambda" => cfg.train.lambda = parse(key, value, line)?,
                "alpha" => cfg.train.alpha = parse(key, value, line)?,
                "beta" => cfg.train.beta = parse(key, value, line)?,
                "learning_rate" => cfg.train.learning_rate = parse(key, value, line)?,
                "max_epochs" => cfg.train.max_epochs = parse(key, value, line)?,
                "convergence_tol" => cfg.train.convergence_tol = parse(key, value, line)?,
                "seed" => cfg.train.seed = parse(key, value, line)?,
                "variant" => cfg.train.variant = parse(key, value, line)?,
                "k" => cfg.k = parse(key, value, line)?,
                "normalize" => cfg.normalize = parse(key, value, line)?,
                "folds" => cfg.folds = parse(key, value, line)?,
                "methods" => cfg.methods = Method::parse_list(value).with_context(|| format!("line {line}"))?,
                "target" => cfg.target = Some(parse(key, value, line)?),
                "data" => cfg.data = Some(path()),
                "out_dir" => cfg.out_dir = Some(path()),
                "user_graph" => cfg.user_graph = Some(path()),
                "item_graph" => cfg.item_graph = Some(path()),
                other => bail!("line {line}: unknown key {other:?} (known keys: {})", KEYS.join(", ")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::parse(&text, base).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.k == 0 {
            bail!("k must be at least 1");
        }
        if self.folds < 2 {
            bail!("folds must be at least 2");
        }
        Ok(())
    }
}
