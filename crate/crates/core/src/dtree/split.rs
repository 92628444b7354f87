use crate::dataset::{Column, Dataset, Label};
use crate::error::{Error, Result};

/// Gains this small are treated as zero when deciding split eligibility.
pub(crate) const GAIN_EPSILON: f64 = 1e-12;

/// Shannon entropy of a binary label array, in bits. Empty input is 0.
pub fn entropy(labels: &[Label]) -> f64 {
    let attack = labels.iter().filter(|l| l.is_attack()).count();
    entropy_counts([labels.len() - attack, attack])
}

/// Entropy of a two-class count pair, in bits.
pub(crate) fn entropy_counts(counts: [usize; 2]) -> f64 {
    let total = counts[0] + counts[1];
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// Entropy of a partition's size distribution (split information), in bits.
pub(crate) fn partition_entropy(sizes: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &s in sizes {
        if s > 0 {
            let p = s as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// Gini impurity of a two-class count pair.
pub(crate) fn gini_counts(counts: [usize; 2]) -> f64 {
    let total = counts[0] + counts[1];
    if total == 0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / total as f64;
    let p1 = counts[1] as f64 / total as f64;
    1.0 - p0 * p0 - p1 * p1
}

/// Information gain and split information of a partition given per-child
/// class counts. Children with no rows contribute nothing.
pub(crate) fn gain_and_split_info(parent: [usize; 2], children: &[[usize; 2]]) -> (f64, f64) {
    let total = parent[0] + parent[1];
    if total == 0 {
        return (0.0, 0.0);
    }
    let parent_h = entropy_counts(parent);
    let mut weighted = 0.0;
    let mut sizes = Vec::with_capacity(children.len());
    for &child in children {
        let n = child[0] + child[1];
        sizes.push(n);
        if n > 0 {
            weighted += (n as f64 / total as f64) * entropy_counts(child);
        }
    }
    let gain = parent_h - weighted;
    let split_info = partition_entropy(&sizes, total);
    (gain, split_info)
}

/// Gain divided by split information; zero when split information is zero.
pub(crate) fn gain_ratio_of(parent: [usize; 2], children: &[[usize; 2]]) -> f64 {
    let (gain, split_info) = gain_and_split_info(parent, children);
    if split_info <= 0.0 {
        0.0
    } else {
        gain / split_info
    }
}

/// Mean Gini decrease of a partition given per-child class counts.
pub(crate) fn gini_decrease(parent: [usize; 2], children: &[[usize; 2]]) -> f64 {
    let total = parent[0] + parent[1];
    if total == 0 {
        return 0.0;
    }
    let mut weighted = 0.0;
    for &child in children {
        let n = child[0] + child[1];
        if n > 0 {
            weighted += (n as f64 / total as f64) * gini_counts(child);
        }
    }
    gini_counts(parent) - weighted
}

/// A split to score against a dataset column.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    /// Multi-way partition, one part per observed category.
    Nominal,
    /// Binary partition into `x <= t` and `x > t`.
    NumericThreshold(f64),
}

/// Gain ratio of splitting `d` on `attribute` as described by `split`.
pub fn gain_ratio(d: &Dataset, attribute: &str, split: &SplitSpec) -> Result<f64> {
    let pos = d
        .schema()
        .position_of(attribute)
        .ok_or_else(|| Error::UnknownColumn {
            name: attribute.to_string(),
        })?;
    let labels = d.labels();
    let mut parent = [0usize; 2];
    for l in labels {
        parent[l.as_bit() as usize] += 1;
    }
    let children: Vec<[usize; 2]> = match (d.column(pos), split) {
        (Column::Nominal(col), SplitSpec::Nominal) => {
            let mut counts = vec![[0usize; 2]; col.vocab().len()];
            for (&code, l) in col.codes().iter().zip(labels) {
                counts[code as usize][l.as_bit() as usize] += 1;
            }
            counts
        }
        (Column::Numeric(values), SplitSpec::NumericThreshold(t)) => {
            let mut counts = [[0usize; 2]; 2];
            for (&x, l) in values.iter().zip(labels) {
                let side = usize::from(x > *t);
                counts[side][l.as_bit() as usize] += 1;
            }
            counts.to_vec()
        }
        _ => {
            return Err(Error::invalid_param(
                "split",
                format!("split kind does not match the kind of column {attribute:?}"),
            ))
        }
    };
    Ok(gain_ratio_of(parent, &children))
}

/// Result of a numeric threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSearch {
    pub threshold: f64,
    pub gain_ratio: f64,
}

/// Best binary threshold for a numeric attribute: the midpoint between
/// consecutive sorted distinct values that maximizes gain ratio, ties broken
/// by the smaller threshold. Errors when all values are identical.
pub fn best_numeric_threshold(values: &[f64], labels: &[Label]) -> Result<ThresholdSearch> {
    if values.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: labels.len(),
        });
    }
    let mut pairs: Vec<(f64, u8)> = values
        .iter()
        .zip(labels)
        .map(|(&v, l)| (v, l.as_bit()))
        .collect();
    match threshold_scan(&mut pairs, 1, Criterion::GainRatio) {
        Some(best) => Ok(ThresholdSearch {
            threshold: best.threshold,
            gain_ratio: best.score,
        }),
        None => Err(Error::invalid_param(
            "values",
            "needs at least 2 distinct values",
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Criterion {
    GainRatio,
    Gini,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ScannedThreshold {
    pub threshold: f64,
    /// Criterion value used for ranking (gain ratio or Gini decrease).
    pub score: f64,
    /// Raw information gain (or Gini decrease), used for eligibility.
    pub gain: f64,
}

/// Scan all candidate thresholds of one numeric attribute. `pairs` is scratch
/// and gets sorted in place. Only cuts leaving at least `min_leaf` rows on
/// each side are considered. Returns None when no candidate cut exists.
pub(crate) fn threshold_scan(
    pairs: &mut [(f64, u8)],
    min_leaf: usize,
    criterion: Criterion,
) -> Option<ScannedThreshold> {
    let n = pairs.len();
    if n < 2 * min_leaf.max(1) {
        return None;
    }
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut parent = [0usize; 2];
    for &(_, y) in pairs.iter() {
        parent[y as usize] += 1;
    }

    let mut left = [0usize; 2];
    let mut best: Option<ScannedThreshold> = None;
    for i in 0..n - 1 {
        left[pairs[i].1 as usize] += 1;
        if pairs[i].0 == pairs[i + 1].0 {
            continue;
        }
        let on_left = i + 1;
        if on_left < min_leaf || n - on_left < min_leaf {
            continue;
        }
        let right = [parent[0] - left[0], parent[1] - left[1]];
        let (score, gain) = match criterion {
            Criterion::GainRatio => {
                let (gain, split_info) = gain_and_split_info(parent, &[left, right]);
                let ratio = if split_info <= 0.0 { 0.0 } else { gain / split_info };
                (ratio, gain)
            }
            Criterion::Gini => {
                let dec = gini_decrease(parent, &[left, right]);
                (dec, dec)
            }
        };
        // Midpoint, nudged down so `x <= t` routes exactly the scanned rows
        // even when the midpoint rounds up to the right value.
        let (a, b) = (pairs[i].0, pairs[i + 1].0);
        let mut threshold = a + (b - a) / 2.0;
        if threshold >= b {
            threshold = a;
        }
        let better = match &best {
            None => true,
            Some(cur) => score > cur.score,
        };
        if better {
            best = Some(ScannedThreshold {
                threshold,
                score,
                gain,
            });
        }
    }
    best
}
