use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// Stratified k-fold assignment, one fold index per row. Shuffled class
/// index lists are dealt round-robin, so per-fold class counts differ from
/// exact proportion by at most one. Deterministic by seed.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<u32>> {
    if k < 2 {
        return Err(Error::invalid_param("folds", "must be at least 2"));
    }
    let labels = d.labels();
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, l) in labels.iter().enumerate() {
        by_class[l.as_bit() as usize].push(i);
    }
    for (class, rows) in by_class.iter().enumerate() {
        if rows.len() < k {
            return Err(Error::TooFewClassRows {
                class: class as u8,
                count: rows.len(),
                folds: k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0u32; labels.len()];
    for rows in by_class.iter_mut() {
        rows.shuffle(&mut rng);
        for (j, &row) in rows.iter().enumerate() {
            assignment[row] = (j % k) as u32;
        }
    }
    Ok(assignment)
}

/// Stratified row subsample: per class, a seeded shuffle keeps
/// `round(count * fraction)` rows (at least one). Returned indices are
/// ascending, so relative row order is preserved.
pub fn stratified_subsample(d: &Dataset, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid_param(
            "subsample",
            "fraction must lie in (0, 1]",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = Vec::new();
    for class in [Label::Normal, Label::Attack] {
        let mut rows: Vec<usize> = d
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == class)
            .map(|(i, _)| i)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let keep = ((rows.len() as f64 * fraction).round() as usize)
            .clamp(1, rows.len());
        rows.shuffle(&mut rng);
        selected.extend_from_slice(&rows[..keep]);
    }
    selected.sort_unstable();
    Ok(selected)
}
