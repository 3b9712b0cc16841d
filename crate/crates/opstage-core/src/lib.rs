//! Core algorithms for occupational pneumoconiosis (OP) staging from lung
//! sub-region radiographs.
//!
//! The pipeline has three computational stages plus an experiment harness:
//!
//! 1. **Texture features** — quantize a grayscale raster, build directed
//!    gray-level co-occurrence matrices at four fixed offsets, and reduce
//!    each to four statistics (energy, contrast, negated entropy, inverse
//!    variance), giving a 16-component feature vector per image
//!    ([`image`], [`glcm`], [`texture`]).
//! 2. **Classification** — a weighted broad learning system: random feature
//!    and enhancement mappings whose only trained parameters are the output
//!    weights, solved in closed form from a class-inverse-frequency weighted
//!    ridge objective ([`wbls`]).
//! 3. **Staging** — the GBZ70-2015 rule table mapping six sub-region opacity
//!    levels plus a large-opacities flag to a final stage ([`staging`]).
//!
//! The [`synth`], [`eval`], and [`experiment`] modules generate synthetic
//! labeled texture corpora, score predictions, and run the split / balance /
//! repeat protocol comparing the weighted model against its unweighted
//! ablation.
//!
//! Everything here is deterministic: all randomness flows from explicit
//! 64-bit seeds through a ChaCha12 generator, and every function is a pure
//! function of its inputs. The crate is `no_std` (with `alloc`); IO and file
//! formats live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod eval;
pub mod experiment;
pub mod glcm;
pub mod image;
pub mod linalg;
pub mod staging;
pub mod synth;
pub mod texture;
pub mod wbls;

mod math;

pub use eval::LabeledSample;
pub use image::GrayImage;
pub use texture::FeatureVector;
pub use wbls::{train, WblsError, WblsHyperParams, WblsModel};
