use std::fmt::Write as _;

use super::{EvalReport, Method};
use crate::error::{Error, Result};

/// Relative improvement of `target` over `baseline`, in percent of the target
/// value: `(baseline - target) / target * 100`.
pub fn improvement_percent(baseline: f64, target: f64) -> f64 {
    if baseline == target {
        return 0.0;
    }
    (baseline - target) / target * 100.0
}

/// Rendered comparison: an aligned text table and the same cells as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub text: String,
    pub csv: String,
}

/// Tabulates mean MAE and RMSE per method, one row pair per latent
/// dimension. Baseline cells show the improvement of the target over them;
/// the target column is wrapped in `*`.
///
/// All reports must come from the same dataset and fold assignment.
pub fn emit_comparison(reports: &[EvalReport], baselines: &[Method], target: Method) -> Result<Comparison> {
    let first = reports.first().ok_or_else(|| Error::Argument("no reports to compare".into()))?;
    for r in reports {
        if r.dataset != first.dataset {
            return Err(Error::Argument(format!(
                "reports mix datasets {:?} and {:?}",
                first.dataset, r.dataset
            )));
        }
        let mismatched = match (r.fold_signature, first.fold_signature) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        };
        if mismatched || r.fold_ids() != first.fold_ids() {
            return Err(Error::Argument(format!(
                "{} and {} were evaluated on different fold assignments",
                first.method, r.method
            )));
        }
    }

    let mut dims: Vec<Option<usize>> = reports.iter().filter(|r| r.method == target).map(|r| r.d).collect();
    if dims.is_empty() {
        return Err(Error::Argument(format!("no report for target {target}")));
    }
    dims.sort();
    dims.dedup();
    // Methods without a latent dimension are shared by every row.
    let find = |m: Method, d: Option<usize>| -> Result<&EvalReport> {
        reports
            .iter()
            .find(|r| r.method == m && r.d == d)
            .or_else(|| reports.iter().find(|r| r.method == m && r.d.is_none()))
            .ok_or_else(|| Error::Argument(format!("no report for {m} at d={}", fmt_dim(d))))
    };

    let columns: Vec<Method> = baselines.iter().copied().filter(|&m| m != target).chain([target]).collect();
    let mut header = vec!["d".to_string(), "metric".to_string()];
    header.extend(columns.iter().map(|m| if *m == target { format!("*{m}*") } else { m.to_string() }));
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut csv = String::from("dataset,d,metric,method,value,improvement_pct\n");
    for &d in &dims {
        for (metric, get) in [("MAE", EvalReport::mean_mae as fn(&EvalReport) -> f64), ("RMSE", EvalReport::mean_rmse)] {
            let t = get(find(target, d)?);
            let mut row = vec![fmt_dim(d), metric.to_string()];
            for &m in &columns {
                let v = get(find(m, d)?);
                if m == target {
                    row.push(format!("*{v:.4}*"));
                    let _ = writeln!(csv, "{},{},{metric},{m},{v:.4},", first.dataset, fmt_dim(d));
                } else {
                    let pct = improvement_percent(v, t);
                    row.push(format!("{v:.4} ({pct:.2}%)"));
                    let _ = writeln!(csv, "{},{},{metric},{m},{v:.4},{pct:.2}", first.dataset, fmt_dim(d));
                }
            }
            rows.push(row);
        }
    }

    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut text = format!("dataset: {}\n", first.dataset);
    for line in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(text, "{}", cells.join("  ").trim_end());
    }
    Ok(Comparison { text, csv })
}

/// One line per report: mean and sample standard deviation of both metrics.
pub fn summary_table(reports: &[EvalReport]) -> String {
    let header = ["dataset", "method", "d", "folds", "MAE", "MAE sd", "RMSE", "RMSE sd"].map(String::from);
    let rows: Vec<[String; 8]> = reports
        .iter()
        .map(|r| {
            [
                r.dataset.clone(),
                r.method.to_string(),
                fmt_dim(r.d),
                r.folds.len().to_string(),
                format!("{:.4}", r.mean_mae()),
                format!("{:.4}", r.std_mae()),
                format!("{:.4}", r.mean_rmse()),
                format!("{:.4}", r.std_rmse()),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..8).map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0)).collect();
    let mut text = String::new();
    for line in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(text, "{}", cells.join("  ").trim_end());
    }
    text
}

fn fmt_dim(d: Option<usize>) -> String {
    d.map_or_else(|| "-".to_string(), |d| d.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::FoldMetrics;
    use crate::factorization::Variant;

    fn one_fold(method: Method, mae: f64, rmse: f64) -> EvalReport {
        EvalReport {
            dataset: "ml".into(),
            method,
            d: Some(10),
            folds: vec![FoldMetrics { fold: 0, mae, rmse, n_test: 1 }],
            config: String::new(),
            fold_signature: Some(1),
            traces: Vec::new(),
        }
    }

    #[test]
    fn improvement_convention() {
        assert!((improvement_percent(1.1787, 0.8978) - 31.2875).abs() < 1e-3);
        assert_eq!(format!("{:.2}", improvement_percent(1.1787, 0.8978)), "31.29");
        assert_eq!(improvement_percent(0.9, 0.9), 0.0);
    }

    #[test]
    fn passthrough_cells() {
        let cmf = Method::Mf(Variant::Cmf);
        let pmf = Method::Mf(Variant::Pmf);
        let reports = [one_fold(pmf, 1.1787, 1.5), one_fold(cmf, 0.8978, 1.2)];
        let c = emit_comparison(&reports, &[pmf], cmf).unwrap();
        assert!(c.text.contains("1.1787 (31.29%)"), "{}", c.text);
        assert!(c.text.contains("*0.8978*"));
        assert!(c.text.contains("*CMF*"));
        assert!(c.csv.contains("ml,10,MAE,PMF,1.1787,31.29\n"));
        assert!(c.csv.contains("ml,10,RMSE,CMF,1.2000,\n"));
    }

    #[test]
    fn equal_reports_show_zero() {
        let cmf = Method::Mf(Variant::Cmf);
        let pmf = Method::Mf(Variant::Pmf);
        let c = emit_comparison(&[one_fold(pmf, 0.9, 1.0), one_fold(cmf, 0.9, 1.0)], &[pmf], cmf).unwrap();
        assert!(c.text.contains("0.9000 (0.00%)"));
    }

    #[test]
    fn mismatched_folds_rejected() {
        let cmf = Method::Mf(Variant::Cmf);
        let pmf = Method::Mf(Variant::Pmf);
        let mut other = one_fold(pmf, 1.0, 1.0);
        other.fold_signature = Some(2);
        assert!(emit_comparison(&[other, one_fold(cmf, 0.9, 1.0)], &[pmf], cmf).is_err());
        let mut ds = one_fold(pmf, 1.0, 1.0);
        ds.dataset = "bx".into();
        assert!(emit_comparison(&[ds, one_fold(cmf, 0.9, 1.0)], &[pmf], cmf).is_err());
    }
}
