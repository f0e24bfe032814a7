//! Data model and serialization: tensor bundles, dataset manifests and
//! feature matrices.

mod ftb;
mod manifest;
mod matrix;
mod tensor;

pub use ftb::{read_bundle, write_bundle};
pub use manifest::{
    load_manifest, save_manifest, DatasetManifest, ManifestRecord, Split, TaskKind,
};
pub use matrix::{csv_field, FeatureMatrix};
pub use tensor::{Tensor, TensorBundle};

/// 64-bit FNV-1a over a byte stream; used as a cheap order/content digest
/// when two artifacts must agree on example order.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
