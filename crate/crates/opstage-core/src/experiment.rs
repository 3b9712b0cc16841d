//! The split / balance / train / repeat protocol comparing the weighted
//! model against its unweighted ablation.
//!
//! Every repeat derives its own seed, `master_seed * 1,000,003 + r`
//! (wrapping, r = 1..=repeats), and fans it out to three sub-seeds (split,
//! balance, model) drawn from a ChaCha12 generator. The weighted and
//! unweighted variants of a repeat share the identical split, balanced test
//! set, and random maps, so the sample weighting is the only difference
//! between them.

use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{
    accuracy, balance_test_set, confusion_and_recall, split_dataset, ConfusionStats, EvalError,
    LabeledSample,
};
use crate::linalg::DenseMatrix;
use crate::math;
use crate::texture::FEATURE_DIM;
use crate::wbls::{train, WblsError, WblsHyperParams};

/// Protocol parameters. The hyperparameter seed is ignored: each repeat
/// derives its model seed from `master_seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub train_fraction: f64,
    pub repeats: usize,
    pub master_seed: u64,
    pub hyper: WblsHyperParams,
    pub run_unweighted_baseline: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            train_fraction: 0.75,
            repeats: 10,
            master_seed: 0,
            hyper: WblsHyperParams::default(),
            run_unweighted_baseline: true,
        }
    }
}

/// Errors from the experiment protocol.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid protocol options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] WblsError),
}

/// Metrics of one model variant on one repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub accuracy: f64,
    #[serde(flatten)]
    pub stats: ConfusionStats,
}

/// Everything recorded about one repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRecord {
    /// 1-based repeat index.
    pub repeat: usize,
    /// The derived repeat seed.
    pub seed: u64,
    /// Training-set size per class (imbalance preserved).
    pub train_class_counts: Vec<usize>,
    /// Balanced test-set size per class (all equal).
    pub test_class_counts: Vec<usize>,
    pub weighted: VariantOutcome,
    pub unweighted: Option<VariantOutcome>,
}

/// Mean and sample standard deviation of a variant's metrics across repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_minority_recall: f64,
    pub std_minority_recall: f64,
}

/// The full experiment result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub class_names: Vec<String>,
    /// Class with the fewest samples in the input corpus (lowest index on
    /// ties); recall of this class is the headline imbalance metric.
    pub minority_class: usize,
    pub options: ProtocolOptions,
    pub records: Vec<RepeatRecord>,
    pub weighted_aggregate: AggregateStats,
    pub unweighted_aggregate: Option<AggregateStats>,
    /// Weighted minus unweighted mean minority recall, when the baseline ran.
    pub minority_recall_margin: Option<f64>,
}

/// The seed of repeat `r` (1-based) under `master_seed`.
pub fn repeat_seed(master_seed: u64, r: usize) -> u64 {
    master_seed.wrapping_mul(1_000_003).wrapping_add(r as u64)
}

/// The three sub-seeds (split, balance, model) of one repeat.
pub fn derive_sub_seeds(repeat_seed: u64) -> (u64, u64, u64) {
    let mut rng = ChaCha12Rng::seed_from_u64(repeat_seed);
    (rng.next_u64(), rng.next_u64(), rng.next_u64())
}

fn features_matrix(samples: &[LabeledSample]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(samples.len(), FEATURE_DIM);
    for (r, sample) in samples.iter().enumerate() {
        for (c, &v) in sample.features.components().iter().enumerate() {
            m.set(r, c, v);
        }
    }
    m
}

fn class_counts(samples: &[LabeledSample], classes: usize) -> Vec<usize> {
    let mut counts = alloc::vec![0usize; classes];
    for s in samples {
        counts[s.label] += 1;
    }
    counts
}

fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, math::sqrt(ss / (n - 1) as f64))
}

fn aggregate(outcomes: &[&VariantOutcome], minority: usize) -> AggregateStats {
    let accuracies: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
    let recalls: Vec<f64> = outcomes.iter().map(|o| o.stats.recall[minority]).collect();
    let (mean_accuracy, std_accuracy) = mean_and_sample_std(&accuracies);
    let (mean_minority_recall, std_minority_recall) = mean_and_sample_std(&recalls);
    AggregateStats {
        mean_accuracy,
        std_accuracy,
        mean_minority_recall,
        std_minority_recall,
    }
}

/// Runs the full protocol over an in-memory corpus.
///
/// For each repeat: shuffle-split (train keeps the corpus imbalance),
/// balance the test set, train the weighted model, optionally train the
/// unweighted ablation on the same split with the same model seed, and
/// score both on the balanced test set. Aggregates use the sample standard
/// deviation across repeats.
pub fn run_experiment(
    samples: &[LabeledSample],
    class_names: &[String],
    options: &ProtocolOptions,
) -> Result<ExperimentReport, ExperimentError> {
    if options.repeats == 0 {
        return Err(ExperimentError::InvalidOptions("repeats must be >= 1"));
    }
    if !(options.train_fraction > 0.0 && options.train_fraction < 1.0) {
        return Err(ExperimentError::InvalidOptions(
            "train_fraction must lie strictly between 0 and 1",
        ));
    }
    options.hyper.validate().map_err(ExperimentError::Model)?;
    let classes = class_names.len();
    if classes < 2 {
        return Err(ExperimentError::InvalidOptions("need at least two classes"));
    }
    for s in samples {
        if s.label >= classes {
            return Err(ExperimentError::Eval(EvalError::LabelOutOfRange {
                label: s.label,
                classes,
            }));
        }
    }

    let corpus_counts = class_counts(samples, classes);
    let minority_class = corpus_counts
        .iter()
        .enumerate()
        .min_by_key(|(_, &c)| c)
        .map(|(k, _)| k)
        .unwrap_or(0);

    let mut records = Vec::with_capacity(options.repeats);
    for r in 1..=options.repeats {
        let seed = repeat_seed(options.master_seed, r);
        let (split_seed, balance_seed, model_seed) = derive_sub_seeds(seed);

        let (train_set, test_set) = split_dataset(samples, options.train_fraction, split_seed)?;
        let balanced = balance_test_set(&test_set, classes, balance_seed)?;

        let x_train = features_matrix(&train_set);
        let labels_train: Vec<usize> = train_set.iter().map(|s| s.label).collect();
        let x_test = features_matrix(&balanced);
        let labels_test: Vec<usize> = balanced.iter().map(|s| s.label).collect();

        let run_variant = |weighted: bool| -> Result<VariantOutcome, ExperimentError> {
            let hyper = WblsHyperParams {
                seed: model_seed,
                weighted,
                ..options.hyper
            };
            let model = train(&x_train, &labels_train, class_names, &hyper)?;
            let (pred, _) = model.predict(&x_test)?;
            Ok(VariantOutcome {
                accuracy: accuracy(&pred, &labels_test)?,
                stats: confusion_and_recall(&pred, &labels_test, classes)?,
            })
        };

        let weighted = run_variant(true)?;
        let unweighted = if options.run_unweighted_baseline {
            Some(run_variant(false)?)
        } else {
            None
        };

        records.push(RepeatRecord {
            repeat: r,
            seed,
            train_class_counts: class_counts(&train_set, classes),
            test_class_counts: class_counts(&balanced, classes),
            weighted,
            unweighted,
        });
    }

    let weighted_aggregate = aggregate(
        &records.iter().map(|r| &r.weighted).collect::<Vec<_>>(),
        minority_class,
    );
    let unweighted_aggregate = if options.run_unweighted_baseline {
        Some(aggregate(
            &records
                .iter()
                .filter_map(|r| r.unweighted.as_ref())
                .collect::<Vec<_>>(),
            minority_class,
        ))
    } else {
        None
    };
    let minority_recall_margin = unweighted_aggregate
        .as_ref()
        .map(|u| weighted_aggregate.mean_minority_recall - u.mean_minority_recall);

    Ok(ExperimentReport {
        class_names: class_names.to_vec(),
        minority_class,
        options: *options,
        records,
        weighted_aggregate,
        unweighted_aggregate,
        minority_recall_margin,
    })
}
