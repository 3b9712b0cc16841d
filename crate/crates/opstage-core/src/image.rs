//! Quantized grayscale rasters, the unit of feature extraction.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    /// A raster value exceeds the declared maximum (or a pixel reaches the
    /// level count).
    #[error("pixel value {value} exceeds maximum {max}")]
    InvalidPixel { value: u16, max: u16 },
    #[error("image has no pixels")]
    EmptyImage,
    #[error("pixel buffer holds {got} values, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    /// Quantization needs at least two output levels; images allow any
    /// positive count up to 65536.
    #[error("unsupported gray-level count {0}")]
    InvalidLevels(usize),
}

/// A quantized 2-D grayscale raster: every pixel lies in `[0, levels)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    levels: usize,
    pixels: Vec<u16>,
}

impl GrayImage {
    /// Validates the raster invariants: non-empty, `width * height` pixels,
    /// every pixel below `levels`.
    pub fn new(
        width: usize,
        height: usize,
        levels: usize,
        pixels: Vec<u16>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage);
        }
        if levels == 0 || levels > usize::from(u16::MAX) + 1 {
            return Err(ImageError::InvalidLevels(levels));
        }
        if pixels.len() != width * height {
            return Err(ImageError::SizeMismatch {
                expected: width * height,
                got: pixels.len(),
            });
        }
        let max = (levels - 1) as u16;
        if let Some(&bad) = pixels.iter().find(|&&p| p > max) {
            return Err(ImageError::InvalidPixel { value: bad, max });
        }
        Ok(Self {
            width,
            height,
            levels,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)`; values are taken modulo
    /// nothing and must already be valid levels.
    pub fn from_fn(
        width: usize,
        height: usize,
        levels: usize,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Self::new(width, height, levels, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> u16 {
        debug_assert!(row < self.height && col < self.width);
        self.pixels[row * self.width + col]
    }

    /// Row-major pixel buffer.
    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }
}

/// Quantizes a raw raster into `levels` gray levels by uniform binning:
/// `floor(value * levels / (max_value + 1))`.
///
/// `raster` is row-major with `width * height` entries, each at most
/// `max_value`.
pub fn quantize_image(
    raster: &[u16],
    width: usize,
    height: usize,
    max_value: u16,
    levels: usize,
) -> Result<GrayImage, ImageError> {
    if width == 0 || height == 0 || raster.is_empty() {
        return Err(ImageError::EmptyImage);
    }
    if raster.len() != width * height {
        return Err(ImageError::SizeMismatch {
            expected: width * height,
            got: raster.len(),
        });
    }
    if levels < 2 || levels > usize::from(u16::MAX) + 1 {
        return Err(ImageError::InvalidLevels(levels));
    }
    let denom = u64::from(max_value) + 1;
    let mut pixels = Vec::with_capacity(raster.len());
    for &v in raster {
        if v > max_value {
            return Err(ImageError::InvalidPixel {
                value: v,
                max: max_value,
            });
        }
        // v <= max_value guarantees the quotient stays below `levels`.
        pixels.push((u64::from(v) * levels as u64 / denom) as u16);
    }
    GrayImage::new(width, height, levels, pixels)
}
