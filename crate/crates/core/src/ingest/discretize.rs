use crate::error::{Error, Result};

/// Maps each value to the half-open bin `[edges[i], edges[i+1])` holding it.
/// Absent values and values outside every bin become `None`.
pub fn discretize_numeric(column: &[Option<f64>], edges: &[f64]) -> Result<Vec<Option<usize>>> {
    if edges.len() < 2 {
        return Err(Error::Config("need at least two bin edges".into()));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!(
            "bin edges must be strictly increasing: {edges:?}"
        )));
    }
    Ok(column.iter().map(|v| v.and_then(|x| bin_of(x, edges))).collect())
}

fn bin_of(x: f64, edges: &[f64]) -> Option<usize> {
    if !x.is_finite() || x < edges[0] || x >= edges[edges.len() - 1] {
        return None;
    }
    // first edge strictly greater than x, minus one
    Some(edges.partition_point(|&e| e <= x) - 1)
}

/// Human-readable label of a bin, e.g. `[30,40)`.
pub fn bin_label(edges: &[f64], bin: usize) -> String {
    format!("[{},{})", edges[bin], edges[bin + 1])
}
