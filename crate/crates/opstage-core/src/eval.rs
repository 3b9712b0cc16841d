//! Dataset splitting, test-set balancing, and classification metrics.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::texture::FeatureVector;

/// One labeled feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub id: String,
    pub features: FeatureVector,
    pub label: usize,
}

/// Errors from splitting, balancing, and scoring.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// train_fraction outside (0, 1).
    #[error("train fraction must lie strictly between 0 and 1")]
    InvalidFraction,
    /// A split would leave one side empty.
    #[error("split leaves an empty {0} set")]
    SplitError(&'static str),
    /// A class required for balancing is absent from the test set.
    #[error("class {0} is absent from the test set")]
    MissingClass(usize),
    /// Sequence lengths disagree, or a length is zero.
    #[error("length mismatch: expected {expected}, got {got}")]
    ShapeError { expected: usize, got: usize },
    /// A label is outside `0..classes`.
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
}

/// Shuffles by `seed` and cuts: the first `ceil(train_fraction * n)` samples
/// train, the rest test. Both sides must end up non-empty.
pub fn split_dataset(
    samples: &[LabeledSample],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledSample>, Vec<LabeledSample>), EvalError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(EvalError::InvalidFraction);
    }
    let n = samples.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let train_count = math::ceil(train_fraction * n as f64) as usize;
    if train_count == 0 {
        return Err(EvalError::SplitError("train"));
    }
    if train_count >= n {
        return Err(EvalError::SplitError("test"));
    }
    let train = order[..train_count]
        .iter()
        .map(|&i| samples[i].clone())
        .collect();
    let test = order[train_count..]
        .iter()
        .map(|&i| samples[i].clone())
        .collect();
    Ok((train, test))
}

/// Downsamples every class in `test` to the smallest class count, removing
/// surplus samples uniformly at random by `seed`. Survivors keep their
/// original relative order.
pub fn balance_test_set(
    test: &[LabeledSample],
    classes: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>, EvalError> {
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); classes];
    for (i, sample) in test.iter().enumerate() {
        if sample.label >= classes {
            return Err(EvalError::LabelOutOfRange {
                label: sample.label,
                classes,
            });
        }
        by_class[sample.label].push(i);
    }
    if let Some(missing) = by_class.iter().position(|v| v.is_empty()) {
        return Err(EvalError::MissingClass(missing));
    }
    let target = by_class.iter().map(|v| v.len()).min().unwrap_or(0);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut keep = alloc::vec![false; test.len()];
    for indices in &mut by_class {
        indices.shuffle(&mut rng);
        for &i in indices.iter().take(target) {
            keep[i] = true;
        }
    }
    Ok(test
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(_, s)| s.clone())
        .collect())
}

/// Fraction of positions where prediction equals truth.
pub fn accuracy(predictions: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    if predictions.len() != truth.len() || predictions.is_empty() {
        return Err(EvalError::ShapeError {
            expected: truth.len(),
            got: predictions.len(),
        });
    }
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// Confusion matrix and per-class recall for one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionStats {
    /// `confusion[t][p]` counts samples of true class t predicted as p.
    pub confusion: Vec<Vec<u64>>,
    /// `recall[k] = confusion[k][k] / row_sum(k)`, 0 for empty rows.
    pub recall: Vec<f64>,
    /// Classes with no truth samples (their recall 0 is a placeholder).
    pub empty_classes: Vec<usize>,
}

/// Builds the m x m confusion matrix (rows = truth, columns = prediction)
/// and per-class recall.
pub fn confusion_and_recall(
    predictions: &[usize],
    truth: &[usize],
    classes: usize,
) -> Result<ConfusionStats, EvalError> {
    if predictions.len() != truth.len() || predictions.is_empty() {
        return Err(EvalError::ShapeError {
            expected: truth.len(),
            got: predictions.len(),
        });
    }
    let mut confusion = alloc::vec![alloc::vec![0u64; classes]; classes];
    for (&p, &t) in predictions.iter().zip(truth) {
        for label in [p, t] {
            if label >= classes {
                return Err(EvalError::LabelOutOfRange { label, classes });
            }
        }
        confusion[t][p] += 1;
    }
    let mut recall = Vec::with_capacity(classes);
    let mut empty_classes = Vec::new();
    for (k, row) in confusion.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total == 0 {
            empty_classes.push(k);
            recall.push(0.0);
        } else {
            recall.push(row[k] as f64 / total as f64);
        }
    }
    Ok(ConfusionStats {
        confusion,
        recall,
        empty_classes,
    })
}
