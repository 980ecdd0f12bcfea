//! `cmf`: prepare datasets, build neighbor graphs, train models and run
//! cross-validated comparisons.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cmf", version, about = "Coupled matrix factorization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a raw dataset dump into interchange files.
    Prepare(PrepareArgs),
    /// Build a top-K neighbor graph for users or items.
    Couple(CoupleArgs),
    /// Train one model on all ratings of a prepared dataset.
    Train(TrainArgs),
    /// Run a k-fold study over several methods.
    Evaluate(EvaluateArgs),
    /// Tabulate report CSVs against a target method.
    Compare(CompareArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DatasetKind {
    Movielens,
    Bookcrossing,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Entities {
    Users,
    Items,
}

#[derive(Args, Debug)]
struct PrepareArgs {
    #[arg(long, value_enum)]
    dataset: DatasetKind,
    /// Directory holding the raw dump.
    #[arg(long)]
    input: PathBuf,
    /// Output directory [default: $CMF_OUT_DIR, else ./cmf-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep only the first N rating lines (MovieLens only).
    #[arg(long)]
    max_ratings: Option<usize>,
}

#[derive(Args, Debug)]
struct CoupleArgs {
    /// Prepared dataset directory.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    entities: Entities,
    /// coupled, pearson, cosine, jaccard or rating-pearson.
    #[arg(long, default_value = "coupled")]
    kind: String,
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Keep raw similarity weights instead of normalizing each list.
    #[arg(long)]
    raw: bool,
    /// Keep zero and negative similarities.
    #[arg(long)]
    keep_nonpositive: bool,
    /// Output file [default: <out dir>/<entities>-<kind>.graph].
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Settings that override the config file.
#[derive(Args, Debug, Default, Clone)]
struct Overrides {
    /// key=value run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prepared dataset directory.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(short = 'd', long)]
    dim: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Neighborhood size.
    #[arg(long)]
    k: Option<usize>,
    /// Neighbor graph files to use instead of building them.
    #[arg(long)]
    user_graph: Option<PathBuf>,
    #[arg(long)]
    item_graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    common: Overrides,
    /// CMF, PMF, RSVD, ISMF, PSMF, CSMF or JSMF.
    #[arg(long)]
    variant: Option<String>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Overrides,
    /// Comma-separated methods, e.g. CMF,PMF,RSVD,ISMF,UBCF,IBCF,PSMF,CSMF,JSMF.
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated latent dimensions [default: d from the config].
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    folds: Option<usize>,
    /// Method highlighted in the comparison table.
    #[arg(long)]
    target: Option<String>,
    /// Similarity kind of --user-graph/--item-graph.
    #[arg(long, default_value = "coupled")]
    graph_kind: String,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Report CSV files written by `evaluate`.
    #[arg(long, required = true, num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long, default_value = "CMF")]
    target: String,
    /// Comma-separated baselines [default: every other method in the reports].
    #[arg(long)]
    baselines: Option<String>,
    #[arg(long)]
    out_table: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match cli.command {
        Command::Prepare(a) => commands::prepare(a),
        Command::Couple(a) => commands::couple(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Compare(a) => commands::compare(a),
    }
}
