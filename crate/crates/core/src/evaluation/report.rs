use super::Method;
use crate::error::{Error, Result};
use crate::factorization::TrainTrace;
use crate::fmt::format_significant;

pub const CSV_HEADER: [&str; 6] = ["dataset", "method", "d", "fold", "mae", "rmse"];

#[derive(Debug, Clone, PartialEq)]
pub struct FoldMetrics {
    pub fold: usize,
    pub mae: f64,
    pub rmse: f64,
    /// Test ratings scored; 0 when unknown (reports read back from CSV).
    pub n_test: usize,
}

/// Cross-validated scores of one method on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub dataset: String,
    pub method: Method,
    /// Latent dimension, for MF-family methods.
    pub d: Option<usize>,
    pub folds: Vec<FoldMetrics>,
    pub config: String,
    /// [`crate::FoldAssignment::signature`] of the folds used, when known.
    pub fold_signature: Option<u64>,
    /// Training traces, one per fold, for MF-family methods.
    pub traces: Vec<TrainTrace>,
}

fn mean(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n == 0 {
        return f64::NAN;
    }
    xs.sum::<f64>() / n as f64
}

/// Sample standard deviation; 0 for fewer than two values.
fn sample_std(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs.clone());
    (xs.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

impl EvalReport {
    pub fn mean_mae(&self) -> f64 {
        mean(self.folds.iter().map(|f| f.mae))
    }

    pub fn mean_rmse(&self) -> f64 {
        mean(self.folds.iter().map(|f| f.rmse))
    }

    pub fn std_mae(&self) -> f64 {
        sample_std(self.folds.iter().map(|f| f.mae))
    }

    pub fn std_rmse(&self) -> f64 {
        sample_std(self.folds.iter().map(|f| f.rmse))
    }

    pub fn fold_ids(&self) -> Vec<usize> {
        self.folds.iter().map(|f| f.fold).collect()
    }

    /// Appends one CSV row per fold.
    pub fn write_csv_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        let d = self.d.map(|d| d.to_string()).unwrap_or_default();
        for f in &self.folds {
            w.write_record([
                self.dataset.as_str(),
                self.method.as_str(),
                d.as_str(),
                &f.fold.to_string(),
                &format_significant(f.mae, 17),
                &format_significant(f.rmse, 17),
            ])
            .map_err(csv_error)?;
        }
        Ok(())
    }

    /// `dataset,method,d,fold,mae,rmse` with a header row.
    pub fn to_csv(reports: &[EvalReport]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(csv_error)?;
        for r in reports {
            r.write_csv_rows(&mut w)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Argument(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Argument(e.to_string()))
    }

    /// Reads reports back from [`EvalReport::to_csv`] output, grouping rows
    /// by (dataset, method, d) in first-appearance order.
    pub fn from_csv(text: &str) -> Result<Vec<EvalReport>> {
        const FILE: &str = "report csv";
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = rd.headers().map_err(csv_error)?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::parse(FILE, 1, format!("expected header {}", CSV_HEADER.join(","))));
        }
        let mut out: Vec<EvalReport> = Vec::new();
        for (n, rec) in rd.records().enumerate() {
            let line = n + 2;
            let rec = rec.map_err(csv_error)?;
            if rec.len() != CSV_HEADER.len() {
                return Err(Error::parse(FILE, line, "wrong number of fields"));
            }
            let num = |k: usize| -> Result<f64> {
                rec[k].parse().map_err(|_| Error::parse(FILE, line, format!("bad number {:?}", &rec[k])))
            };
            let method: Method = rec[1].parse()?;
            let d = match &rec[2] {
                "" => None,
                s => Some(s.parse().map_err(|_| Error::parse(FILE, line, format!("bad d {s:?}")))?),
            };
            let fold = rec[3].parse().map_err(|_| Error::parse(FILE, line, format!("bad fold {:?}", &rec[3])))?;
            let metrics = FoldMetrics { fold, mae: num(4)?, rmse: num(5)?, n_test: 0 };
            match out.iter_mut().find(|r| r.dataset == rec[0] && r.method == method && r.d == d) {
                Some(r) => r.folds.push(metrics),
                None => out.push(EvalReport {
                    dataset: rec[0].to_string(),
                    method,
                    d,
                    folds: vec![metrics],
                    config: String::new(),
                    fold_signature: None,
                    traces: Vec::new(),
                }),
            }
        }
        Ok(out)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Argument(format!("csv: {e}"))
}
