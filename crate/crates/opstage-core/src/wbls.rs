//! Weighted broad learning system classifier.
//!
//! The network is flat: a random feature layer `Z = tanh(X W_f + beta_f)`, a
//! random enhancement layer `H = sigmoid(Z W_e + beta_e)`, and a hidden
//! matrix `A = [Z | H]` whose only trained parameters are the output weights
//! `W`. Training solves the weighted ridge system
//!
//! ```text
//! (lambda I + A' C_w A) W = A' C_w L
//! ```
//!
//! in closed form, where `C_w` is diagonal with `C_ii = 1 / N_k` (the size
//! of sample i's class) so that every class contributes equal total weight
//! to the objective regardless of its sample count. `weighted = false`
//! selects the unweighted ablation `C_w = I`.
//!
//! All randomness comes from a ChaCha12 generator seeded with the
//! hyperparameter seed; entries are drawn uniformly from [-1, 1] in a fixed
//! documented order, so identical inputs produce bit-identical models.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky_solve, DenseMatrix};
use crate::math;

/// Relative normal-equation residual bound enforced on every solve.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Errors from training and prediction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WblsError {
    /// Hyperparameters violate `p >= 1`, `q >= 1`, or `lambda > 0`.
    #[error("invalid hyperparameters: {0}")]
    InvalidHyper(&'static str),
    /// A matrix dimension does not match its counterpart.
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeError {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A class in `0..m` has no training sample while weighting is on.
    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    /// Fewer than two distinct classes in the training labels.
    #[error("training labels contain fewer than two distinct classes")]
    DegenerateLabels,
    /// Non-finite values encountered, or the solve failed its residual bound.
    #[error("numeric failure: {0}")]
    NumericError(&'static str),
}

/// Hyperparameters of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WblsHyperParams {
    /// Width p of the feature layer.
    pub feature_nodes: usize,
    /// Width q of the enhancement layer.
    pub enhancement_nodes: usize,
    /// Ridge regularizer lambda.
    pub lambda: f64,
    /// Seed for the random feature and enhancement maps.
    pub seed: u64,
    /// `false` selects the unweighted ablation (identity sample weights).
    pub weighted: bool,
}

impl Default for WblsHyperParams {
    fn default() -> Self {
        Self {
            feature_nodes: 10,
            enhancement_nodes: 10,
            lambda: 1e-3,
            seed: 0,
            weighted: true,
        }
    }
}

impl WblsHyperParams {
    pub fn validate(&self) -> Result<(), WblsError> {
        if self.feature_nodes == 0 {
            return Err(WblsError::InvalidHyper("feature_nodes must be >= 1"));
        }
        if self.enhancement_nodes == 0 {
            return Err(WblsError::InvalidHyper("enhancement_nodes must be >= 1"));
        }
        let lambda_ok = self.lambda.is_finite() && self.lambda > 0.0;
        if !lambda_ok {
            return Err(WblsError::InvalidHyper("lambda must be positive and finite"));
        }
        Ok(())
    }
}

/// The frozen random layers. `feature_weights` is d x p (column i is the
/// weight vector of feature node i); `enhancement_weights` is p x q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomMaps {
    pub feature_weights: DenseMatrix,
    pub feature_biases: Vec<f64>,
    pub enhancement_weights: DenseMatrix,
    pub enhancement_biases: Vec<f64>,
}

/// Per-feature affine input conditioning fitted on the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    /// Fits per-column mean and population standard deviation; columns with
    /// zero variance get scale 1 so they pass through centered.
    pub fn fit(x: &DenseMatrix) -> Self {
        let (n, d) = (x.rows(), x.cols());
        let mut means = Vec::with_capacity(d);
        let mut scales = Vec::with_capacity(d);
        for c in 0..d {
            let mut sum = 0.0;
            for r in 0..n {
                sum += x.get(r, c);
            }
            let mean = sum / n as f64;
            let mut ss = 0.0;
            for r in 0..n {
                let dev = x.get(r, c) - mean;
                ss += dev * dev;
            }
            let std = math::sqrt(ss / n as f64);
            means.push(mean);
            scales.push(if std > 0.0 { std } else { 1.0 });
        }
        Self { means, scales }
    }

    /// Applies `(x - mean) / scale` per column.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix, WblsError> {
        if x.cols() != self.means.len() {
            return Err(WblsError::ShapeError {
                context: "standardize",
                expected: self.means.len(),
                got: x.cols(),
            });
        }
        let mut out = DenseMatrix::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                out.set(r, c, (x.get(r, c) - self.means[c]) / self.scales[c]);
            }
        }
        Ok(out)
    }
}

/// The diagonal of `C_w` plus the per-class sample counts it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights {
    pub diag: Vec<f64>,
    pub class_counts: Vec<usize>,
}

/// A trained model: everything needed to reproduce predictions exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WblsModel {
    pub hyper: WblsHyperParams,
    pub standardizer: Standardizer,
    pub maps: RandomMaps,
    /// (p+q) x m output weights.
    pub output_weights: DenseMatrix,
    /// Class names in one-hot column order.
    pub class_names: Vec<String>,
}

/// Draws the random feature and enhancement maps from the seed.
///
/// Draw order (uniform on [-1, 1] throughout): the d entries of each feature
/// node's weight vector, node by node; then the p feature biases; then the p
/// entries of each enhancement node's weight vector, node by node; then the
/// q enhancement biases.
pub fn init_random_maps(input_dim: usize, hyper: &WblsHyperParams) -> Result<RandomMaps, WblsError> {
    hyper.validate()?;
    if input_dim == 0 {
        return Err(WblsError::InvalidHyper("input_dim must be >= 1"));
    }
    let (p, q) = (hyper.feature_nodes, hyper.enhancement_nodes);
    let mut rng = ChaCha12Rng::seed_from_u64(hyper.seed);
    let draw = |rows: usize, cols: usize, rng: &mut ChaCha12Rng| {
        // Column-by-column so each node's weight vector is drawn contiguously.
        let mut m = DenseMatrix::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.set(r, c, rng.random_range(-1.0..=1.0));
            }
        }
        m
    };
    let feature_weights = draw(input_dim, p, &mut rng);
    let feature_biases: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let enhancement_weights = draw(p, q, &mut rng);
    let enhancement_biases: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Ok(RandomMaps {
        feature_weights,
        feature_biases,
        enhancement_weights,
        enhancement_biases,
    })
}

/// `Z = tanh(X W_f + beta_f)`, elementwise.
pub fn build_feature_layer(x: &DenseMatrix, maps: &RandomMaps) -> Result<DenseMatrix, WblsError> {
    if x.cols() != maps.feature_weights.rows() {
        return Err(WblsError::ShapeError {
            context: "feature layer",
            expected: maps.feature_weights.rows(),
            got: x.cols(),
        });
    }
    let mut z = x.matmul(&maps.feature_weights);
    activate(&mut z, &maps.feature_biases, math::tanh);
    Ok(z)
}

/// `H = sigmoid(Z W_e + beta_e)`, elementwise. The enhancement layer
/// consumes the feature layer, not the raw input.
pub fn build_enhancement_layer(z: &DenseMatrix, maps: &RandomMaps) -> Result<DenseMatrix, WblsError> {
    if z.cols() != maps.enhancement_weights.rows() {
        return Err(WblsError::ShapeError {
            context: "enhancement layer",
            expected: maps.enhancement_weights.rows(),
            got: z.cols(),
        });
    }
    let mut h = z.matmul(&maps.enhancement_weights);
    activate(&mut h, &maps.enhancement_biases, math::sigmoid);
    Ok(h)
}

fn activate(m: &mut DenseMatrix, biases: &[f64], f: fn(f64) -> f64) {
    debug_assert_eq!(m.cols(), biases.len());
    for r in 0..m.rows() {
        for (c, &bias) in biases.iter().enumerate() {
            m.set(r, c, f(m.get(r, c) + bias));
        }
    }
}

/// `A = [Z | H]`, feature columns first.
pub fn assemble_hidden(z: &DenseMatrix, h: &DenseMatrix) -> Result<DenseMatrix, WblsError> {
    if z.rows() != h.rows() {
        return Err(WblsError::ShapeError {
            context: "hidden assembly",
            expected: z.rows(),
            got: h.rows(),
        });
    }
    let (n, p, q) = (z.rows(), z.cols(), h.cols());
    let mut a = DenseMatrix::zeros(n, p + q);
    for r in 0..n {
        for c in 0..p {
            a.set(r, c, z.get(r, c));
        }
        for c in 0..q {
            a.set(r, p + c, h.get(r, c));
        }
    }
    Ok(a)
}

/// Builds the diagonal of `C_w` from class labels.
///
/// Weighted: `diag[i] = 1 / N_k` for sample i in class k, so each class
/// contributes total weight exactly 1 and the diagonal sums to m. Unweighted
/// ablation: all ones.
pub fn compute_class_weights(
    labels: &[usize],
    m: usize,
    weighted: bool,
) -> Result<ClassWeights, WblsError> {
    let mut class_counts = alloc::vec![0usize; m];
    for &label in labels {
        if label >= m {
            return Err(WblsError::ShapeError {
                context: "class label",
                expected: m,
                got: label,
            });
        }
        class_counts[label] += 1;
    }
    if weighted {
        if let Some(empty) = class_counts.iter().position(|&c| c == 0) {
            return Err(WblsError::EmptyClass(empty));
        }
    }
    let diag = labels
        .iter()
        .map(|&label| {
            if weighted {
                1.0 / class_counts[label] as f64
            } else {
                1.0
            }
        })
        .collect();
    Ok(ClassWeights { diag, class_counts })
}

/// Solves `(lambda I + A' C_w A) W = A' C_w L` by Cholesky factorization and
/// verifies the relative normal-equation residual is within
/// [`RESIDUAL_BOUND`].
pub fn solve_output_weights(
    a: &DenseMatrix,
    diag: &[f64],
    l: &DenseMatrix,
    lambda: f64,
) -> Result<DenseMatrix, WblsError> {
    if diag.len() != a.rows() {
        return Err(WblsError::ShapeError {
            context: "weight diagonal",
            expected: a.rows(),
            got: diag.len(),
        });
    }
    if l.rows() != a.rows() {
        return Err(WblsError::ShapeError {
            context: "label rows",
            expected: a.rows(),
            got: l.rows(),
        });
    }
    let lambda_ok = lambda.is_finite() && lambda > 0.0;
    if !lambda_ok {
        return Err(WblsError::InvalidHyper("lambda must be positive"));
    }
    if !a.is_finite() || !l.is_finite() || diag.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(WblsError::NumericError("non-finite or non-positive input"));
    }

    let k = a.cols();
    let mut system = a.gram_weighted(diag);
    for i in 0..k {
        system.set(i, i, system.get(i, i) + lambda);
    }
    let rhs = a.cross_weighted(diag, l);
    let w = cholesky_solve(&system, &rhs)
        .ok_or(WblsError::NumericError("weighted gram system is not positive definite"))?;

    // Residual check: the factorization must actually have solved the system.
    let mut residual = system.matmul(&w);
    for r in 0..residual.rows() {
        for c in 0..residual.cols() {
            residual.set(r, c, residual.get(r, c) - rhs.get(r, c));
        }
    }
    let rhs_norm = rhs.frobenius_norm();
    if residual.frobenius_norm() > RESIDUAL_BOUND * rhs_norm {
        return Err(WblsError::NumericError("normal-equation residual exceeds bound"));
    }
    Ok(w)
}

/// The Eq.-(9) training objective `sum_i diag[i] ||A_i W - L_i||^2 +
/// lambda ||W||_F^2`; exposed for optimality checks.
pub fn objective(
    a: &DenseMatrix,
    diag: &[f64],
    l: &DenseMatrix,
    lambda: f64,
    w: &DenseMatrix,
) -> f64 {
    debug_assert_eq!(diag.len(), a.rows());
    let scores = a.matmul(w);
    let mut acc = 0.0;
    for (r, &weight) in diag.iter().enumerate() {
        let mut row = 0.0;
        for c in 0..l.cols() {
            let d = scores.get(r, c) - l.get(r, c);
            row += d * d;
        }
        acc += weight * row;
    }
    let wn = w.frobenius_norm();
    acc + lambda * wn * wn
}

/// Trains a model: fit the standardizer, draw the random maps, build the
/// hidden layer, and solve the weighted ridge system.
pub fn train(
    x_raw: &DenseMatrix,
    labels: &[usize],
    class_names: &[String],
    hyper: &WblsHyperParams,
) -> Result<WblsModel, WblsError> {
    hyper.validate()?;
    let (n, d) = (x_raw.rows(), x_raw.cols());
    let m = class_names.len();
    if labels.len() != n {
        return Err(WblsError::ShapeError {
            context: "label count",
            expected: n,
            got: labels.len(),
        });
    }
    if d == 0 || n == 0 {
        return Err(WblsError::InvalidHyper("training matrix must be non-empty"));
    }
    if m < 2 {
        return Err(WblsError::DegenerateLabels);
    }
    if n < m {
        return Err(WblsError::InvalidHyper("need at least one sample per class"));
    }
    let mut seen = alloc::vec![false; m];
    for &label in labels {
        if label >= m {
            return Err(WblsError::ShapeError {
                context: "class label",
                expected: m,
                got: label,
            });
        }
        seen[label] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(WblsError::DegenerateLabels);
    }
    if !x_raw.is_finite() {
        return Err(WblsError::NumericError("non-finite training features"));
    }

    let standardizer = Standardizer::fit(x_raw);
    let x = standardizer.apply(x_raw)?;
    let maps = init_random_maps(d, hyper)?;
    let z = build_feature_layer(&x, &maps)?;
    let h = build_enhancement_layer(&z, &maps)?;
    let a = assemble_hidden(&z, &h)?;
    let weights = compute_class_weights(labels, m, hyper.weighted)?;

    let mut l = DenseMatrix::zeros(n, m);
    for (i, &label) in labels.iter().enumerate() {
        l.set(i, label, 1.0);
    }
    let output_weights = solve_output_weights(&a, &weights.diag, &l, hyper.lambda)?;

    Ok(WblsModel {
        hyper: *hyper,
        standardizer,
        maps,
        output_weights,
        class_names: class_names.to_vec(),
    })
}

impl WblsModel {
    /// Raw score matrix `A W` (t x m) for a feature matrix.
    pub fn scores(&self, x_raw: &DenseMatrix) -> Result<DenseMatrix, WblsError> {
        if x_raw.cols() != self.standardizer.means.len() {
            return Err(WblsError::ShapeError {
                context: "predict features",
                expected: self.standardizer.means.len(),
                got: x_raw.cols(),
            });
        }
        let x = self.standardizer.apply(x_raw)?;
        let z = build_feature_layer(&x, &self.maps)?;
        let h = build_enhancement_layer(&z, &self.maps)?;
        let a = assemble_hidden(&z, &h)?;
        Ok(a.matmul(&self.output_weights))
    }

    /// Predicted class indices (argmax per row, ties to the lowest index),
    /// alongside the raw scores.
    pub fn predict(&self, x_raw: &DenseMatrix) -> Result<(Vec<usize>, DenseMatrix), WblsError> {
        let scores = self.scores(x_raw)?;
        let classes = (0..scores.rows()).map(|r| argmax(scores.row(r))).collect();
        Ok((classes, scores))
    }
}

/// Index of the row maximum; ties break toward the lowest index.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
