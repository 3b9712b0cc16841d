//! Texture statistics over normalized GLCMs and the 16-component feature
//! vector fed to the classifier.
//!
//! Entropy and contrast square the cell probability (`h(i,j)^2`), which
//! differs from the classical Haralick forms that use `h(i,j)` linearly.
//! The squared forms are kept deliberately; see the crate README.

use serde::{Deserialize, Serialize};

use crate::glcm::{compute_glcm, normalize_glcm, GlcmError, GlcmOffset, NormalizedGlcm};
use crate::image::GrayImage;
use crate::math;

/// The four offsets used for feature extraction, in feature order:
/// (1,0), (0,1), (2,0), (1,1).
pub const FEATURE_OFFSETS: [GlcmOffset; 4] = [
    GlcmOffset::unchecked(1, 0),
    GlcmOffset::unchecked(0, 1),
    GlcmOffset::unchecked(2, 0),
    GlcmOffset::unchecked(1, 1),
];

/// Number of components in a [`FeatureVector`].
pub const FEATURE_DIM: usize = 16;

/// Sum of squared cell probabilities; 1 exactly when a single cell carries
/// all mass, smaller the more uniform the distribution.
pub fn energy(g: &NormalizedGlcm) -> f64 {
    g.probs().iter().map(|&h| h * h).sum()
}

/// `-sum h^2 ln h`, with empty cells contributing zero.
pub fn entropy(g: &NormalizedGlcm) -> f64 {
    // Accumulate the (non-positive) inner sum and negate once at the end;
    // negating per-term can leave a -0.0 when all mass sits in one cell.
    let inner = g
        .probs()
        .iter()
        .filter(|&&h| h > 0.0)
        .fold(0.0, |acc, &h| acc + h * h * math::ln(h));
    0.0 - inner
}

/// `sum h / (1 + (i - j)^2)`; 1 exactly when all mass sits on the diagonal.
pub fn inverse_variance(g: &NormalizedGlcm) -> f64 {
    let n = g.levels();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i as f64 - j as f64;
            acc += g.prob(i, j) / (1.0 + d * d);
        }
    }
    acc
}

/// `sum (i - j)^2 h^2`; zero exactly when all mass sits on the diagonal.
pub fn contrast(g: &NormalizedGlcm) -> f64 {
    let n = g.levels();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = i as f64 - j as f64;
            let h = g.prob(i, j);
            acc += d * d * h * h;
        }
    }
    acc
}

/// The four statistics of one normalized GLCM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureStats {
    pub energy: f64,
    pub entropy: f64,
    pub inverse_variance: f64,
    pub contrast: f64,
}

impl TextureStats {
    pub fn from_glcm(g: &NormalizedGlcm) -> Self {
        Self {
            energy: energy(g),
            entropy: entropy(g),
            inverse_variance: inverse_variance(g),
            contrast: contrast(g),
        }
    }
}

/// The per-image classifier input: for each offset in [`FEATURE_OFFSETS`],
/// the block `(energy, contrast, -entropy, inverse_variance)`, concatenated
/// in offset order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn components(&self) -> &[f64; FEATURE_DIM] {
        &self.0
    }
}

/// Extracts the feature vector of an image: one GLCM per offset, normalized,
/// reduced to its statistics block.
///
/// The image must admit pairs at every offset (at least 3 columns and 2
/// rows); otherwise the empty-GLCM error propagates.
pub fn feature_vector(img: &GrayImage) -> Result<FeatureVector, GlcmError> {
    let mut out = [0.0; FEATURE_DIM];
    for (k, &offset) in FEATURE_OFFSETS.iter().enumerate() {
        let stats = TextureStats::from_glcm(&normalize_glcm(&compute_glcm(img, offset)?)?);
        out[4 * k] = stats.energy;
        out[4 * k + 1] = stats.contrast;
        // 0.0 - x rather than -x keeps the zero-entropy component +0.0.
        out[4 * k + 2] = 0.0 - stats.entropy;
        out[4 * k + 3] = stats.inverse_variance;
    }
    Ok(FeatureVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glcm::tests::ramp_fixture;
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    // Oracle values for the ramp fixture at offset (1,0), computed by an
    // independent double-loop summation over the four occupied cells
    // {(0,1): 10/42, (1,2): 11/42, (2,3): 11/42, (3,0): 10/42}.
    const RAMP_ENERGY: f64 = 0.250_566_893_424_036_26; // 442/1764
    const RAMP_ENTROPY: f64 = 0.346_509_238_472_354_8;
    const RAMP_IDM: f64 = 0.404_761_904_761_904_77; // 17/42
    const RAMP_CONTRAST: f64 = 0.704_081_632_653_061_2; // 1242/1764

    fn ramp_normalized() -> NormalizedGlcm {
        let g = compute_glcm(&ramp_fixture(), FEATURE_OFFSETS[0]).unwrap();
        normalize_glcm(&g).unwrap()
    }

    fn mass_point() -> NormalizedGlcm {
        let img = GrayImage::new(6, 1, 4, vec![2; 6]).unwrap();
        normalize_glcm(&compute_glcm(&img, FEATURE_OFFSETS[0]).unwrap()).unwrap()
    }

    /// Builds a normalized GLCM directly from a probability table, bypassing
    /// image construction for the analytic uniform/diagonal cases.
    fn uniform_from_probs(levels: usize, probs: Vec<f64>) -> NormalizedGlcm {
        assert_eq!(probs.len(), levels * levels);
        NormalizedGlcm::from_parts(levels, FEATURE_OFFSETS[0], probs)
    }

    #[test]
    fn energy_of_mass_point_is_one() {
        assert_eq!(energy(&mass_point()), 1.0);
    }

    #[test]
    fn energy_of_uniform_quarter_levels() {
        let probs = vec![1.0 / 16.0; 16];
        let g = uniform_from_probs(4, probs);
        assert_abs_diff_eq!(energy(&g), 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn energy_of_ramp() {
        assert_abs_diff_eq!(energy(&ramp_normalized()), RAMP_ENERGY, epsilon = 1e-15);
    }

    #[test]
    fn entropy_of_mass_point_is_positive_zero() {
        let e = entropy(&mass_point());
        assert_eq!(e, 0.0);
        assert!(e.is_sign_positive());
    }

    #[test]
    fn entropy_of_uniform_four_levels() {
        let g = uniform_from_probs(4, vec![1.0 / 16.0; 16]);
        // 16 * (1/256) * ln 16
        assert_abs_diff_eq!(entropy(&g), 0.173_286_795_139_986_32, epsilon = 1e-15);
    }

    #[test]
    fn entropy_of_ramp() {
        assert_abs_diff_eq!(entropy(&ramp_normalized()), RAMP_ENTROPY, epsilon = 1e-15);
    }

    #[test]
    fn inverse_variance_of_mass_point_is_one() {
        assert_eq!(inverse_variance(&mass_point()), 1.0);
    }

    #[test]
    fn inverse_variance_of_ramp() {
        assert_abs_diff_eq!(inverse_variance(&ramp_normalized()), RAMP_IDM, epsilon = 1e-15);
    }

    #[test]
    fn inverse_variance_of_uniform_two_levels() {
        let g = uniform_from_probs(2, vec![0.25; 4]);
        assert_abs_diff_eq!(inverse_variance(&g), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn contrast_of_diagonal_mass_is_zero() {
        assert_eq!(contrast(&mass_point()), 0.0);
    }

    #[test]
    fn contrast_of_ramp() {
        assert_abs_diff_eq!(contrast(&ramp_normalized()), RAMP_CONTRAST, epsilon = 1e-15);
    }

    #[test]
    fn contrast_of_uniform_two_levels() {
        let g = uniform_from_probs(2, vec![0.25; 4]);
        assert_abs_diff_eq!(contrast(&g), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn feature_vector_of_constant_image() {
        let img = GrayImage::new(4, 4, 8, vec![5; 16]).unwrap();
        let fv = feature_vector(&img).unwrap();
        let expect = [1.0, 0.0, 0.0, 1.0];
        for k in 0..4 {
            assert_eq!(&fv.components()[4 * k..4 * k + 4], &expect);
        }
        // The negated-entropy slots must be +0.0, not -0.0.
        assert!(fv.components()[2].is_sign_positive());
    }

    #[test]
    fn feature_vector_of_ramp_first_block() {
        let fv = feature_vector(&ramp_fixture()).unwrap();
        assert_abs_diff_eq!(fv.components()[0], RAMP_ENERGY, epsilon = 1e-15);
        assert_abs_diff_eq!(fv.components()[1], RAMP_CONTRAST, epsilon = 1e-15);
        assert_abs_diff_eq!(fv.components()[2], -RAMP_ENTROPY, epsilon = 1e-15);
        assert_abs_diff_eq!(fv.components()[3], RAMP_IDM, epsilon = 1e-15);
    }

    #[test]
    fn feature_vector_rejects_narrow_image() {
        // Width 2 cannot host the (2,0) offset.
        let img = GrayImage::new(2, 5, 4, vec![1; 10]).unwrap();
        assert!(feature_vector(&img).is_err());
    }
}
