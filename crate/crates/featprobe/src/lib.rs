//! featprobe: hand-crafted and convolutional feature extraction from
//! mel-spectrograms, representation similarity (linear CKA, CCA, SVCCA,
//! regression R^2) and linear decoding of discriminative tasks.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`dsp`] turns audio clips into 128-mel dB spectrograms,
//! 2. [`handcrafted`] and [`convnet`] turn spectrograms into feature
//!    matrices (signal-processing statistics, or taps from five small
//!    convolutional architectures with seeded or imported weights),
//! 3. [`simlab`] scores pairs of feature matrices with similarity measures,
//! 4. [`probe`] decodes task labels from feature matrices with normalized
//!    multinomial logistic regression or least squares.
//!
//! [`tensorio`] holds the shared data model (tensor bundles, manifests,
//! feature matrices) and the FTB serialization format; [`synth`] generates
//! the small parameterized audio corpora used for experiments and tests.

pub mod convnet;
pub mod dsp;
pub mod error;
pub mod handcrafted;
pub mod mat;
pub mod probe;
pub mod simlab;
pub mod synth;
pub mod tensorio;

pub use error::{Error, Result};
pub use mat::Mat;
