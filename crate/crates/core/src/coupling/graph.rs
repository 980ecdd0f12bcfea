use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use super::onehot::OneHot;
use super::rating::{Axis, RatingProfiles};
use super::{CouplingModel, SimilarityKind};
use crate::error::{Error, Result};
use crate::fmt::format_significant;
use crate::ingest::{AttributeTable, RatingDataset};
use crate::parallel::map_range;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    /// Neighbors kept per entity.
    pub k: usize,
    /// Keep candidates with similarity <= 0.
    pub keep_nonpositive: bool,
    /// Divide each list by its weight sum.
    pub normalize: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            k: 50,
            keep_nonpositive: false,
            normalize: true,
        }
    }
}

impl GraphOptions {
    pub fn with_k(k: usize) -> Self {
        GraphOptions {
            k,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            Err(Error::Config("neighborhood size K must be at least 1".into()))
        } else {
            Ok(())
        }
    }
}

/// Per-entity top-K weighted neighbor lists.
///
/// Lists exclude the entity itself and are sorted by descending weight, ties
/// by ascending index. Weights are non-negative unless the graph was built
/// with `keep_nonpositive`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    kind: SimilarityKind,
    normalized: bool,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl NeighborGraph {
    /// Validates ordering and self-loop invariants.
    pub fn from_lists(kind: SimilarityKind, normalized: bool, neighbors: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = neighbors.len();
        for (i, list) in neighbors.iter().enumerate() {
            for (pos, &(j, w)) in list.iter().enumerate() {
                if j >= n {
                    return Err(Error::IndexOutOfRange { what: "neighbor", index: j, len: n });
                }
                if j == i {
                    return Err(Error::Argument(format!("entity {i} lists itself as a neighbor")));
                }
                if !w.is_finite() {
                    return Err(Error::Numeric(format!("non-finite weight for {i}->{j}")));
                }
                if pos > 0 && rank(&list[pos - 1], &(j, w)) != Ordering::Less {
                    return Err(Error::Argument(format!("neighbors of {i} are not in rank order")));
                }
            }
        }
        Ok(NeighborGraph {
            kind,
            normalized,
            neighbors,
        })
    }

    /// A graph where nobody has neighbors.
    pub fn empty(kind: SimilarityKind, n: usize) -> Self {
        NeighborGraph {
            kind,
            normalized: true,
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn n_entities(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub fn lists(&self) -> &[Vec<(usize, f64)>] {
        &self.neighbors
    }

    /// For every entity `v`, the `(u, w_uv)` pairs with `v` in `u`'s list,
    /// ordered by `u`.
    pub fn reverse(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rev = vec![Vec::new(); self.neighbors.len()];
        for (u, list) in self.neighbors.iter().enumerate() {
            for &(v, w) in list {
                rev[v].push((u, w));
            }
        }
        rev
    }

    /// Min, max and mean list length.
    pub fn length_stats(&self) -> (usize, usize, f64) {
        let lens = self.neighbors.iter().map(Vec::len);
        let min = lens.clone().min().unwrap_or(0);
        let max = lens.clone().max().unwrap_or(0);
        let mean = if self.neighbors.is_empty() {
            0.0
        } else {
            lens.sum::<usize>() as f64 / self.neighbors.len() as f64
        };
        (min, max, mean)
    }

    /// One line per entity: `idx<TAB>n:w,n:w,...`, weights to 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            let _ = write!(out, "{i}\t");
            for (pos, &(j, w)) in list.iter().enumerate() {
                if pos > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{j}:{}", format_significant(w, 12));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`NeighborGraph::to_text`] output. The normalized flag is
    /// recovered from the weight sums.
    pub fn from_text(text: &str, kind: SimilarityKind) -> Result<Self> {
        const FILE: &str = "neighbor graph";
        let mut neighbors = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::parse(FILE, line_no + 1, m.to_string());
            let (idx, rest) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            if idx.parse::<usize>().ok() != Some(neighbors.len()) {
                return Err(bad("entity indices must be consecutive from 0"));
            }
            let mut list = Vec::new();
            for pair in rest.split(',').filter(|s| !s.is_empty()) {
                let (j, w) = pair.split_once(':').ok_or_else(|| bad("expected neighbor:weight"))?;
                let j = j.parse().map_err(|_| bad("bad neighbor index"))?;
                let w = w.parse().map_err(|_| bad("bad weight"))?;
                list.push((j, w));
            }
            neighbors.push(list);
        }
        let normalized = neighbors
            .iter()
            .filter(|l| !l.is_empty())
            .all(|l| (l.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-9);
        NeighborGraph::from_lists(kind, normalized, neighbors)
    }
}

/// Descending weight, then ascending index.
fn rank(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

fn finish_list(mut list: Vec<(usize, f64)>, opts: &GraphOptions) -> Vec<(usize, f64)> {
    if !opts.keep_nonpositive {
        list.retain(|p| p.1 > 0.0);
    }
    if list.len() > opts.k {
        list.select_nth_unstable_by(opts.k - 1, rank);
        list.truncate(opts.k);
    }
    list.sort_unstable_by(rank);
    if opts.normalize && !list.is_empty() {
        let sum: f64 = list.iter().map(|p| p.1).sum();
        if sum > 0.0 {
            for p in list.iter_mut() {
                p.1 /= sum;
            }
        } else {
            list.clear();
        }
    }
    list
}

/// Top-K graph from an arbitrary pairwise similarity, scanning all pairs.
pub fn build_neighbor_graph<F>(n: usize, kind: SimilarityKind, opts: &GraphOptions, sim: F) -> Result<NeighborGraph>
where
    F: Fn(usize, usize) -> f64 + Sync + Send,
{
    opts.validate()?;
    let neighbors = map_range(n, |i| {
        let list = (0..n).filter(|&j| j != i).map(|j| (j, sim(i, j))).collect();
        finish_list(list, opts)
    });
    Ok(NeighborGraph {
        kind,
        normalized: opts.normalize,
        neighbors,
    })
}

/// Top-K graph for an attribute-based similarity.
///
/// Entities with identical attribute rows have identical similarity rows, so
/// similarities are computed once per pair of distinct rows. The result is
/// identical to [`build_neighbor_graph`] with the same similarity.
pub fn attribute_neighbor_graph(table: &AttributeTable, kind: SimilarityKind, opts: &GraphOptions) -> Result<NeighborGraph> {
    opts.validate()?;
    if !kind.is_attribute_based() {
        return Err(Error::Argument(format!("{kind} is not an attribute similarity")));
    }
    let n = table.n_entities();
    let mut group_of_row: HashMap<&[u32], usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut group = vec![0usize; n];
    for (e, g) in group.iter_mut().enumerate() {
        let id = *group_of_row.entry(table.row(e)).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[id].push(e);
        *g = id;
    }
    let reps: Vec<&[u32]> = members.iter().map(|m| table.row(m[0])).collect();

    let coupling = (kind == SimilarityKind::Coupled).then(|| CouplingModel::new(table));
    let onehot = OneHot::new(table);
    let group_sim = |a: &[u32], b: &[u32]| match &coupling {
        Some(m) => m.row_similarity(a, b),
        None => onehot.similarity(kind, a, b),
    };

    // K+1 best candidates per group; each member drops itself later.
    let want = opts.k.saturating_add(1);
    let candidates: Vec<Vec<(usize, f64)>> = map_range(members.len(), |g| {
        let mut sims: Vec<(usize, f64)> = (0..members.len())
            .map(|h| (h, group_sim(reps[g], reps[h])))
            .filter(|&(_, s)| opts.keep_nonpositive || s > 0.0)
            .collect();
        sims.sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(want);
        let mut level_start = 0;
        while level_start < sims.len() && out.len() < want {
            let s = sims[level_start].1;
            let mut level_end = level_start;
            let mut level: Vec<usize> = Vec::new();
            while level_end < sims.len() && sims[level_end].1 == s {
                level.extend_from_slice(&members[sims[level_end].0]);
                level_end += 1;
            }
            level.sort_unstable();
            out.extend(level.into_iter().take(want - out.len()).map(|e| (e, s)));
            level_start = level_end;
        }
        out
    });

    let neighbors = map_range(n, |e| {
        let list: Vec<(usize, f64)> = candidates[group[e]].iter().copied().filter(|p| p.0 != e).collect();
        finish_list(list, opts)
    });
    Ok(NeighborGraph {
        kind,
        normalized: opts.normalize,
        neighbors,
    })
}

/// Top-K graph of rating Pearson correlations along `axis`.
///
/// Co-rated sums are accumulated through the other axis' rating lists, so
/// only pairs sharing at least one rating are visited.
pub fn rating_neighbor_graph(ds: &RatingDataset, axis: Axis, opts: &GraphOptions) -> Result<NeighborGraph> {
    opts.validate()?;
    let other = match axis {
        Axis::User => Axis::Item,
        Axis::Item => Axis::User,
    };
    let rows = RatingProfiles::new(ds, axis);
    let cols = RatingProfiles::new(ds, other);
    let n = rows.len();

    let neighbors = map_range(n, |i| {
        // count, Σx, Σy, Σx², Σy², Σxy over co-rated entries
        let mut acc: HashMap<usize, [f64; 6]> = HashMap::new();
        for &(o, x) in rows.profile(i) {
            for &(j, y) in cols.profile(o) {
                if j == i {
                    continue;
                }
                let s = acc.entry(j).or_insert([0.0; 6]);
                s[0] += 1.0;
                s[1] += x;
                s[2] += y;
                s[3] += x * x;
                s[4] += y * y;
                s[5] += x * y;
            }
        }
        let list = acc
            .into_iter()
            .map(|(j, s)| (j, pearson_from_sums(&s)))
            .collect();
        finish_list(list, opts)
    });
    Ok(NeighborGraph {
        kind: SimilarityKind::RatingPearson,
        normalized: opts.normalize,
        neighbors,
    })
}

fn pearson_from_sums(s: &[f64; 6]) -> f64 {
    let [c, sx, sy, sxx, syy, sxy] = *s;
    if c < 2.0 {
        return 0.0;
    }
    let vx = sxx - sx * sx / c;
    let vy = syy - sy * sy / c;
    // relative guard against cancellation on constant profiles
    if vx <= 1e-12 * sxx || vy <= 1e-12 * syy {
        return 0.0;
    }
    ((sxy - sx * sy / c) / (vx * vy).sqrt()).clamp(-1.0, 1.0)
}
