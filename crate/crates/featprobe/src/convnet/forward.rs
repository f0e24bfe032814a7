//! Frozen-weight forward pass with per-layer feature taps.

use std::collections::BTreeMap;

use crate::convnet::arch::{ArchitectureSpec, Conv3Spec, ConvSpec, Tap};
use crate::convnet::deform::deform_conv2d;
use crate::convnet::ops::{batchnorm_infer, conv2d, maxpool2d, relu, FeatureMap};
use crate::dsp::MelSpectrogram;
use crate::error::{Error, Result};
use crate::tensorio::{Tensor, TensorBundle};

const BN_EPS: f32 = 1e-5;

/// Where a conv tap is read. The pipeline itself always proceeds
/// conv -> batchnorm -> ReLU (-> pool); the stage only selects which
/// intermediate is copied out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TapStage {
    /// After batch normalization and ReLU.
    #[default]
    PostActivation,
    /// After batch normalization, before ReLU.
    PostNorm,
    /// Raw convolution output.
    PreNorm,
}

/// Runs the architecture on one dB spectrogram and returns the requested
/// taps. Pool taps are always read after pooling.
pub fn forward_extract(
    arch: &ArchitectureSpec,
    weights: &TensorBundle,
    spec: &MelSpectrogram,
    taps: &[Tap],
    stage: TapStage,
) -> Result<BTreeMap<Tap, FeatureMap>> {
    arch.validate_weights(weights)?;
    let values = spec.values();
    let input = FeatureMap::from_data(
        1,
        values.rows(),
        values.cols(),
        values.data().iter().map(|&v| v as f32).collect(),
    );

    let mut out = BTreeMap::new();
    let keep = |tap: Tap, map: &FeatureMap, out: &mut BTreeMap<Tap, FeatureMap>| {
        if taps.contains(&tap) {
            out.insert(tap, map.clone());
        }
    };

    let mut x = input;
    for (block, conv_tap, pool_tap) in [
        (1usize, Tap::Conv1, Some(Tap::Pool1)),
        (2, Tap::Conv2, Some(Tap::Pool2)),
        (3, Tap::Conv3, None),
    ] {
        let pre = match (block, &arch.conv3) {
            (3, Conv3Spec::Deformable { conv, offset }) => deform_conv2d(
                &x,
                tensor(weights, "conv3.w")?,
                conv,
                tensor(weights, "conv3.p.w")?,
                tensor(weights, "conv3.p.b")?,
                offset,
            )?,
            _ => {
                let conv_spec = block_conv(arch, block);
                let bias = if conv_spec.bias {
                    Some(tensor(weights, &format!("conv{block}.b"))?)
                } else {
                    None
                };
                conv2d(
                    &x,
                    tensor(weights, &format!("conv{block}.w"))?,
                    bias,
                    conv_spec.stride,
                    conv_spec.padding,
                    conv_spec.dilation,
                )?
            }
        };
        if stage == TapStage::PreNorm {
            keep(conv_tap, &pre, &mut out);
        }
        let mut act = batchnorm_infer(
            &pre,
            tensor(weights, &format!("bn{block}.gamma"))?.data(),
            tensor(weights, &format!("bn{block}.beta"))?.data(),
            tensor(weights, &format!("bn{block}.mean"))?.data(),
            tensor(weights, &format!("bn{block}.var"))?.data(),
            BN_EPS,
        )?;
        if stage == TapStage::PostNorm {
            keep(conv_tap, &act, &mut out);
        }
        relu(&mut act);
        if stage == TapStage::PostActivation {
            keep(conv_tap, &act, &mut out);
        }
        x = act;
        if let Some(pt) = pool_tap {
            let pool = if block == 1 { &arch.pool1 } else { &arch.pool2 };
            x = maxpool2d(&x, pool.kernel, pool.stride);
            keep(pt, &x, &mut out);
        }
    }
    Ok(out)
}

fn block_conv(arch: &ArchitectureSpec, block: usize) -> ConvSpec {
    match block {
        1 => arch.conv1,
        2 => arch.conv2,
        3 => match &arch.conv3 {
            Conv3Spec::Regular(c) => *c,
            Conv3Spec::Deformable { conv, .. } => *conv,
        },
        _ => unreachable!(),
    }
}

fn tensor<'a>(weights: &'a TensorBundle, name: &str) -> Result<&'a Tensor> {
    weights.get(name).ok_or_else(|| Error::WeightMismatch {
        arch: "bundle".into(),
        detail: format!("missing tensor '{name}'"),
    })
}

/// Turns a tap into one feature row: conv1/pool1 are averaged over
/// channels then flattened to `H*W`; every other tap flattens to `C*H*W`.
pub fn flatten_policy(tap: Tap, map: &FeatureMap) -> Vec<f64> {
    let (c, h, w) = map.dims();
    match tap {
        Tap::Conv1 | Tap::Pool1 => {
            let mut row = vec![0.0f64; h * w];
            for ch in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        row[y * w + x] += map.at(ch, y, x) as f64;
                    }
                }
            }
            for v in &mut row {
                *v /= c as f64;
            }
            row
        }
        _ => map.data().iter().map(|&v| v as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convnet::arch::ArchId;
    use crate::convnet::init::{init_weights, InitConfig};
    use crate::dsp::Scale;
    use crate::mat::Mat;

    fn db_spec(frames: usize) -> MelSpectrogram {
        let data: Vec<f64> = (0..128 * frames)
            .map(|i| -80.0 + ((i * 31) % 81) as f64)
            .collect();
        MelSpectrogram::new(Mat::from_vec(128, frames, data), Scale::Db, 16000, 502)
    }

    fn run(id: ArchId, frames: usize, taps: &[Tap]) -> BTreeMap<Tap, FeatureMap> {
        let arch = ArchitectureSpec::new(id);
        let weights = init_weights(&arch, &InitConfig { seed: 3 });
        forward_extract(&arch, &weights, &db_spec(frames), taps, TapStage::default()).unwrap()
    }

    #[test]
    fn conv3_dims_match_shape_table() {
        assert_eq!(run(ArchId::Regular, 128, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 4, 4));
        assert_eq!(run(ArchId::Regular, 176, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 4, 6));
        assert_eq!(run(ArchId::Dilated, 128, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 6, 6));
        assert_eq!(run(ArchId::OneDF, 128, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 6, 128));
        assert_eq!(run(ArchId::OneDT, 128, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 128, 6));
        assert_eq!(run(ArchId::Deformable, 128, &[Tap::Conv3])[&Tap::Conv3].dims(), (30, 6, 6));
    }

    #[test]
    fn forward_dims_agree_with_analytic_table() {
        for id in ArchId::ALL {
            let arch = ArchitectureSpec::new(id);
            for frames in [128usize, 176] {
                let expect = arch.tap_dims((128, frames)).unwrap();
                let got = run(id, frames, &Tap::ALL);
                for tap in Tap::ALL {
                    assert_eq!(got[&tap].dims(), expect[&tap], "{id} {tap} {frames}");
                }
            }
        }
    }

    #[test]
    fn relu_taps_are_nonnegative() {
        let taps = run(ArchId::Regular, 128, &Tap::ALL);
        for (tap, map) in &taps {
            assert!(
                map.data().iter().all(|&v| v >= 0.0),
                "{tap} has negative activations"
            );
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let a = run(ArchId::Deformable, 128, &[Tap::Conv3]);
        let b = run(ArchId::Deformable, 128, &[Tap::Conv3]);
        assert_eq!(a[&Tap::Conv3].data(), b[&Tap::Conv3].data());
    }

    #[test]
    fn conv1_prenorm_is_positively_homogeneous_without_bias() {
        let arch = ArchitectureSpec::new(ArchId::Regular);
        let mut weights = init_weights(&arch, &InitConfig { seed: 4 });
        // Zero the conv1 bias so scaling commutes with the convolution.
        let zeroed = Tensor::new("conv1.b", vec![10], vec![0.0; 10]).unwrap();
        let mut replaced = TensorBundle::new();
        for t in weights.tensors() {
            if t.name() == "conv1.b" {
                replaced.push(zeroed.clone()).unwrap();
            } else {
                replaced.push(t.clone()).unwrap();
            }
        }
        for (k, v) in weights.meta() {
            replaced.set_meta(k.clone(), v.clone());
        }
        weights = replaced;

        let spec = db_spec(128);
        let alpha = 2.5f64;
        let scaled = MelSpectrogram::new(
            Mat::from_vec(
                128,
                128,
                spec.values().data().iter().map(|&v| v * alpha).collect(),
            ),
            Scale::Db,
            16000,
            502,
        );
        let base = forward_extract(&arch, &weights, &spec, &[Tap::Conv1], TapStage::PreNorm).unwrap();
        let big = forward_extract(&arch, &weights, &scaled, &[Tap::Conv1], TapStage::PreNorm).unwrap();
        for (x, y) in base[&Tap::Conv1].data().iter().zip(big[&Tap::Conv1].data()) {
            assert!(
                (y - x * alpha as f32).abs() <= 1e-3 * x.abs().max(1.0),
                "{y} vs {}",
                x * alpha as f32
            );
        }
    }

    #[test]
    fn flatten_policy_widths() {
        let taps = run(ArchId::Regular, 128, &Tap::ALL);
        assert_eq!(flatten_policy(Tap::Conv3, &taps[&Tap::Conv3]).len(), 480);
        assert_eq!(flatten_policy(Tap::Conv1, &taps[&Tap::Conv1]).len(), 15376);
        assert_eq!(flatten_policy(Tap::Pool1, &taps[&Tap::Pool1]).len(), 62 * 62);
        assert_eq!(flatten_policy(Tap::Conv2, &taps[&Tap::Conv2]).len(), 20 * 22 * 22);
    }

    #[test]
    fn flatten_of_constant_tensor_is_constant() {
        let map = FeatureMap::from_data(3, 2, 2, vec![0.5; 12]);
        let row = flatten_policy(Tap::Conv1, &map);
        assert_eq!(row, vec![0.5; 4]);
        let row = flatten_policy(Tap::Conv3, &map);
        assert_eq!(row, vec![0.5; 12]);
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let regular = ArchitectureSpec::new(ArchId::Regular);
        let dilated_weights = init_weights(&ArchitectureSpec::new(ArchId::Dilated), &InitConfig { seed: 0 });
        // Dilated and Regular share a layout, so cross-validation passes
        // there; the deformable layout differs and must be rejected.
        let deform_weights =
            init_weights(&ArchitectureSpec::new(ArchId::Deformable), &InitConfig { seed: 0 });
        assert!(regular.validate_weights(&deform_weights).is_err());
        assert!(regular.validate_weights(&dilated_weights).is_ok());
    }
}
