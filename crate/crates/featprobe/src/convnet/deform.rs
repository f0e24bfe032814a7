//! Deformable convolution: per-location offsets displace a regular 5x5
//! sampling grid, samples are read by bilinear interpolation, assembled
//! into an expanded map and convolved at stride 5.

use crate::convnet::arch::ConvSpec;
use crate::convnet::ops::{conv2d, FeatureMap};
use crate::error::{Error, Result};
use crate::tensorio::Tensor;

/// Bilinear read with zero outside the map; exact-integer positions
/// reduce to a plain array read.
pub fn bilinear_sample(map: &FeatureMap, channel: usize, y: f32, x: f32) -> f32 {
    let (_, h, w) = map.dims();
    let y0 = y.floor();
    let x0 = x.floor();
    let wy = y - y0;
    let wx = x - x0;
    let mut acc = 0.0;
    for (dy, gy) in [(0.0, 1.0 - wy), (1.0, wy)] {
        let iy = y0 + dy;
        if iy < 0.0 || iy >= h as f32 || gy == 0.0 {
            continue;
        }
        for (dx, gx) in [(0.0, 1.0 - wx), (1.0, wx)] {
            let ix = x0 + dx;
            if ix < 0.0 || ix >= w as f32 || gx == 0.0 {
                continue;
            }
            acc += gy * gx * map.at(channel, iy as usize, ix as usize);
        }
    }
    acc
}

/// Sampling center of output cell `i` along one axis: `1 + stride * i`.
#[inline]
pub fn grid_center(i: usize, stride: usize) -> f32 {
    (1 + stride * i) as f32
}

/// Deformable convolution.
///
/// 1. `offsets = conv(input, offset_weight, offset_bias)` yields
///    `2 * kh * kw` channels per output location: the first `kh * kw`
///    hold row displacements, the rest column displacements, indexed by
///    tap `n = a * kw + b`.
/// 2. Every tap samples the input at
///    `(grid_center + tap_offset + displacement)` by bilinear
///    interpolation, reading zero out of range.
/// 3. The samples form an expanded `[Cin, H'*kh, W'*kw]` map convolved
///    with the main kernel at stride `(kh, kw)`.
pub fn deform_conv2d(
    input: &FeatureMap,
    weight: &Tensor,
    conv_spec: &ConvSpec,
    offset_weight: &Tensor,
    offset_bias: &Tensor,
    offset_spec: &ConvSpec,
) -> Result<FeatureMap> {
    let (cin, _, _) = input.dims();
    let (kh, kw) = conv_spec.kernel;
    let n_taps = kh * kw;
    if offset_spec.out_ch != 2 * n_taps {
        return Err(Error::BadGeometry(format!(
            "offset conv has {} channels, expected {}",
            offset_spec.out_ch,
            2 * n_taps
        )));
    }

    let offsets = conv2d(
        input,
        offset_weight,
        Some(offset_bias),
        offset_spec.stride,
        offset_spec.padding,
        offset_spec.dilation,
    )?;
    let (_, oh, ow) = offsets.dims();

    let mut expanded = FeatureMap::zeros(cin, oh * kh, ow * kw);
    for i in 0..oh {
        for j in 0..ow {
            for a in 0..kh {
                for b in 0..kw {
                    let n = a * kw + b;
                    let dy = offsets.at(n, i, j);
                    let dx = offsets.at(n_taps + n, i, j);
                    let py = grid_center(i, offset_spec.stride.0) + (a as f32 - (kh as f32 - 1.0) / 2.0) + dy;
                    let px = grid_center(j, offset_spec.stride.1) + (b as f32 - (kw as f32 - 1.0) / 2.0) + dx;
                    for c in 0..cin {
                        *expanded.at_mut(c, i * kh + a, j * kw + b) =
                            bilinear_sample(input, c, py, px);
                    }
                }
            }
        }
    }

    conv2d(&expanded, weight, None, (kh, kw), (0, 0), (1, 1))
}
