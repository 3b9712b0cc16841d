//! Directed gray-level co-occurrence matrices.
//!
//! A GLCM for offset `(dx, dy)` counts ordered pixel pairs: cell `(a, b)`
//! holds the number of positions where the pixel value is `a` and the pixel
//! `dx` columns right and `dy` rows down is `b`. Counting is directed — the
//! matrix is not symmetrized.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlcmError {
    /// Offsets must be non-negative and not (0, 0).
    #[error("invalid co-occurrence offset ({dx}, {dy})")]
    InvalidOffset { dx: i64, dy: i64 },
    /// The image admits no pixel pair at the requested offset.
    #[error("no pixel pairs fit offset ({dx}, {dy}) in a {width}x{height} image")]
    EmptyGlcm {
        dx: usize,
        dy: usize,
        width: usize,
        height: usize,
    },
}

/// Column/row displacement selecting which pixel pairs a GLCM counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlcmOffset {
    dx: usize,
    dy: usize,
}

impl GlcmOffset {
    /// Rejects (0, 0) and negative displacements.
    pub fn new(dx: i64, dy: i64) -> Result<Self, GlcmError> {
        if dx < 0 || dy < 0 || (dx == 0 && dy == 0) {
            return Err(GlcmError::InvalidOffset { dx, dy });
        }
        Ok(Self {
            dx: dx as usize,
            dy: dy as usize,
        })
    }

    pub(crate) const fn unchecked(dx: usize, dy: usize) -> Self {
        Self { dx, dy }
    }

    pub fn dx(&self) -> usize {
        self.dx
    }

    pub fn dy(&self) -> usize {
        self.dy
    }
}

/// Raw co-occurrence counts for one offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glcm {
    levels: usize,
    offset: GlcmOffset,
    counts: Vec<u64>,
    total_pairs: u64,
}

impl Glcm {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn offset(&self) -> GlcmOffset {
        self.offset
    }

    #[inline]
    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.levels + b]
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }
}

/// Probability-normalized GLCM: entries sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGlcm {
    levels: usize,
    offset: GlcmOffset,
    probs: Vec<f64>,
}

impl NormalizedGlcm {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn offset(&self) -> GlcmOffset {
        self.offset
    }

    #[inline]
    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.levels + b]
    }

    /// Row-major probability buffer.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[cfg(test)]
    pub(crate) fn from_parts(levels: usize, offset: GlcmOffset, probs: Vec<f64>) -> Self {
        Self {
            levels,
            offset,
            probs,
        }
    }
}

/// Counts ordered co-occurrences of `img` at `offset`.
///
/// Exactly `(width - dx) * (height - dy)` pairs are counted; the image must
/// admit at least one.
pub fn compute_glcm(img: &GrayImage, offset: GlcmOffset) -> Result<Glcm, GlcmError> {
    let (w, h) = (img.width(), img.height());
    if offset.dx >= w || offset.dy >= h {
        return Err(GlcmError::EmptyGlcm {
            dx: offset.dx,
            dy: offset.dy,
            width: w,
            height: h,
        });
    }
    let n = img.levels();
    let mut counts = vec![0u64; n * n];
    for row in 0..h - offset.dy {
        for col in 0..w - offset.dx {
            let a = img.pixel(row, col) as usize;
            let b = img.pixel(row + offset.dy, col + offset.dx) as usize;
            counts[a * n + b] += 1;
        }
    }
    let total_pairs = ((w - offset.dx) * (h - offset.dy)) as u64;
    Ok(Glcm {
        levels: n,
        offset,
        counts,
        total_pairs,
    })
}

/// Divides every count by the pair total so entries sum to 1.
pub fn normalize_glcm(glcm: &Glcm) -> Result<NormalizedGlcm, GlcmError> {
    if glcm.total_pairs == 0 {
        return Err(GlcmError::EmptyGlcm {
            dx: glcm.offset.dx,
            dy: glcm.offset.dy,
            width: 0,
            height: 0,
        });
    }
    let total = glcm.total_pairs as f64;
    let probs = glcm.counts.iter().map(|&c| c as f64 / total).collect();
    Ok(NormalizedGlcm {
        levels: glcm.levels,
        offset: glcm.offset,
        probs,
    })
}
