//! Forward-only inference for the five convolutional architectures, with
//! seeded random initialization and FTB weight import, exposing per-layer
//! feature taps.

mod arch;
mod deform;
mod forward;
mod init;
mod ops;

pub use arch::{ArchId, ArchitectureSpec, Conv3Spec, ConvSpec, PoolSpec, Tap};
pub use deform::{bilinear_sample, deform_conv2d, grid_center};
pub use forward::{flatten_policy, forward_extract, TapStage};
pub use init::{init_weights, InitConfig};
pub use ops::{batchnorm_infer, conv2d, conv_out_len, maxpool2d, relu, FeatureMap};
