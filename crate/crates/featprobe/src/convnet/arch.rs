//! The five convolutional architectures: three conv blocks with batch
//! normalization and ReLU, max pooling after the first two.
//!
//! Layer parameters are identical across corpus geometries; only the
//! input width (and hence tap shapes) differs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::convnet::ops::conv_out_len;
use crate::error::{Error, Result};
use crate::tensorio::TensorBundle;

/// Architecture family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArchId {
    Regular,
    Deformable,
    Dilated,
    OneDF,
    OneDT,
}

impl ArchId {
    pub const ALL: [ArchId; 5] = [
        ArchId::Regular,
        ArchId::Deformable,
        ArchId::Dilated,
        ArchId::OneDF,
        ArchId::OneDT,
    ];
}

impl fmt::Display for ArchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            ArchId::Regular => "regular",
            ArchId::Deformable => "deformable",
            ArchId::Dilated => "dilated",
            ArchId::OneDF => "1df",
            ArchId::OneDT => "1dt",
        };
        write!(f, "{token}")
    }
}

impl FromStr for ArchId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regular" => Ok(ArchId::Regular),
            "deformable" => Ok(ArchId::Deformable),
            "dilated" => Ok(ArchId::Dilated),
            "1df" => Ok(ArchId::OneDF),
            "1dt" => Ok(ArchId::OneDT),
            other => Err(Error::BadFeatureSpec(format!("unknown architecture '{other}'"))),
        }
    }
}

/// Feature tap points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tap {
    Conv1,
    Pool1,
    Conv2,
    Pool2,
    Conv3,
}

impl Tap {
    pub const ALL: [Tap; 5] = [Tap::Conv1, Tap::Pool1, Tap::Conv2, Tap::Pool2, Tap::Conv3];
}

impl fmt::Display for Tap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            Tap::Conv1 => "conv1",
            Tap::Pool1 => "pool1",
            Tap::Conv2 => "conv2",
            Tap::Pool2 => "pool2",
            Tap::Conv3 => "conv3",
        };
        write!(f, "{token}")
    }
}

impl FromStr for Tap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conv1" => Ok(Tap::Conv1),
            "pool1" => Ok(Tap::Pool1),
            "conv2" => Ok(Tap::Conv2),
            "pool2" => Ok(Tap::Pool2),
            "conv3" => Ok(Tap::Conv3),
            other => Err(Error::BadFeatureSpec(format!("unknown tap '{other}'"))),
        }
    }
}

/// Parameters of one 2D convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: (usize, usize),
    pub stride: (usize, usize),
    pub padding: (usize, usize),
    pub dilation: (usize, usize),
    pub bias: bool,
}

impl ConvSpec {
    pub fn out_shape(&self, h: usize, w: usize) -> Option<(usize, usize, usize)> {
        let oh = conv_out_len(h, self.kernel.0, self.stride.0, self.padding.0, self.dilation.0)?;
        let ow = conv_out_len(w, self.kernel.1, self.stride.1, self.padding.1, self.dilation.1)?;
        Some((self.out_ch, oh, ow))
    }

    pub fn weight_dims(&self) -> Vec<usize> {
        vec![self.out_ch, self.in_ch, self.kernel.0, self.kernel.1]
    }
}

/// Max-pooling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolSpec {
    pub kernel: (usize, usize),
    pub stride: (usize, usize),
}

impl PoolSpec {
    pub fn out_shape(&self, c: usize, h: usize, w: usize) -> (usize, usize, usize) {
        let oh = if h < self.kernel.0 { 0 } else { (h - self.kernel.0) / self.stride.0 + 1 };
        let ow = if w < self.kernel.1 { 0 } else { (w - self.kernel.1) / self.stride.1 + 1 };
        (c, oh, ow)
    }
}

/// The third conv block: plain, or deformable (offset conv + grid conv).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conv3Spec {
    Regular(ConvSpec),
    /// `conv` applies the 5x5 kernel on the expanded sample map at stride
    /// 5 without bias; `offset` predicts 2 x 25 per-tap displacements.
    Deformable { conv: ConvSpec, offset: ConvSpec },
}

/// One of the five architectures, fully parameterized.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureSpec {
    pub id: ArchId,
    pub conv1: ConvSpec,
    pub pool1: PoolSpec,
    pub conv2: ConvSpec,
    pub pool2: PoolSpec,
    pub conv3: Conv3Spec,
}

fn conv(
    in_ch: usize,
    out_ch: usize,
    kernel: (usize, usize),
    stride: (usize, usize),
    padding: (usize, usize),
    dilation: (usize, usize),
    bias: bool,
) -> ConvSpec {
    ConvSpec {
        in_ch,
        out_ch,
        kernel,
        stride,
        padding,
        dilation,
        bias,
    }
}

impl ArchitectureSpec {
    pub fn new(id: ArchId) -> Self {
        let pool22 = PoolSpec { kernel: (2, 2), stride: (2, 2) };
        match id {
            ArchId::Regular | ArchId::Deformable => {
                let conv3 = if id == ArchId::Regular {
                    Conv3Spec::Regular(conv(20, 30, (5, 5), (2, 2), (0, 0), (1, 1), true))
                } else {
                    Conv3Spec::Deformable {
                        conv: conv(20, 30, (5, 5), (5, 5), (0, 0), (1, 1), false),
                        offset: conv(20, 50, (3, 3), (2, 2), (1, 1), (1, 1), true),
                    }
                };
                Self {
                    id,
                    conv1: conv(1, 10, (5, 5), (1, 1), (0, 0), (1, 1), true),
                    pool1: pool22,
                    conv2: conv(10, 20, (5, 5), (3, 3), (3, 3), (1, 1), true),
                    pool2: pool22,
                    conv3,
                }
            }
            ArchId::Dilated => Self {
                id,
                conv1: conv(1, 10, (5, 5), (1, 1), (0, 0), (3, 3), true),
                pool1: pool22,
                conv2: conv(10, 20, (5, 5), (2, 2), (3, 3), (2, 2), true),
                pool2: pool22,
                conv3: Conv3Spec::Regular(conv(20, 30, (5, 5), (2, 2), (1, 1), (1, 1), true)),
            },
            ArchId::OneDF => {
                let pool = PoolSpec { kernel: (2, 1), stride: (2, 1) };
                Self {
                    id,
                    conv1: conv(1, 10, (5, 1), (1, 1), (0, 0), (3, 1), true),
                    pool1: pool,
                    conv2: conv(10, 20, (5, 1), (2, 1), (3, 0), (2, 1), true),
                    pool2: pool,
                    conv3: Conv3Spec::Regular(conv(20, 30, (5, 1), (2, 1), (1, 0), (1, 1), true)),
                }
            }
            ArchId::OneDT => {
                let pool = PoolSpec { kernel: (1, 2), stride: (1, 2) };
                Self {
                    id,
                    conv1: conv(1, 10, (1, 5), (1, 1), (0, 0), (1, 3), true),
                    pool1: pool,
                    conv2: conv(10, 20, (1, 5), (1, 2), (0, 3), (1, 2), true),
                    pool2: pool,
                    conv3: Conv3Spec::Regular(conv(20, 30, (1, 5), (1, 2), (0, 1), (1, 1), true)),
                }
            }
        }
    }

    /// Analytic `[C, H, W]` shape of every tap for an input of
    /// `(mel_bins, frames)`.
    pub fn tap_dims(&self, input: (usize, usize)) -> Result<BTreeMap<Tap, (usize, usize, usize)>> {
        let mut shapes = BTreeMap::new();
        let err = |layer: &str| Error::BadGeometry(format!("{layer} does not fit input {input:?}"));

        let (_, h, w) = self.conv1.out_shape(input.0, input.1).ok_or_else(|| err("conv1"))?;
        shapes.insert(Tap::Conv1, (self.conv1.out_ch, h, w));
        let (c, h, w) = self.pool1.out_shape(self.conv1.out_ch, h, w);
        shapes.insert(Tap::Pool1, (c, h, w));
        let (_, h, w) = self.conv2.out_shape(h, w).ok_or_else(|| err("conv2"))?;
        shapes.insert(Tap::Conv2, (self.conv2.out_ch, h, w));
        let (c, h, w) = self.pool2.out_shape(self.conv2.out_ch, h, w);
        shapes.insert(Tap::Pool2, (c, h, w));
        let conv3_shape = match &self.conv3 {
            Conv3Spec::Regular(c3) => c3.out_shape(h, w).ok_or_else(|| err("conv3"))?,
            // Deformable output geometry follows the offset conv grid.
            Conv3Spec::Deformable { conv, offset } => {
                let (_, oh, ow) = offset.out_shape(h, w).ok_or_else(|| err("conv3 offsets"))?;
                (conv.out_ch, oh, ow)
            }
        };
        shapes.insert(Tap::Conv3, conv3_shape);
        Ok(shapes)
    }

    /// Expected weight-bundle layout: `(name, dims)` in generation order.
    pub fn weight_layout(&self) -> Vec<(String, Vec<usize>)> {
        let mut layout = Vec::new();
        let mut block = |idx: usize, conv_spec: &ConvSpec, deform_offset: Option<&ConvSpec>| {
            layout.push((format!("conv{idx}.w"), conv_spec.weight_dims()));
            if conv_spec.bias {
                layout.push((format!("conv{idx}.b"), vec![conv_spec.out_ch]));
            }
            if let Some(off) = deform_offset {
                layout.push((format!("conv{idx}.p.w"), off.weight_dims()));
                layout.push((format!("conv{idx}.p.b"), vec![off.out_ch]));
            }
            for param in ["gamma", "beta", "mean", "var"] {
                layout.push((format!("bn{idx}.{param}"), vec![conv_spec.out_ch]));
            }
        };
        block(1, &self.conv1, None);
        block(2, &self.conv2, None);
        match &self.conv3 {
            Conv3Spec::Regular(c3) => block(3, c3, None),
            Conv3Spec::Deformable { conv, offset } => block(3, conv, Some(offset)),
        }
        layout
    }

    /// Checks that a bundle's tensor names and dims match this
    /// architecture exactly.
    pub fn validate_weights(&self, bundle: &TensorBundle) -> Result<()> {
        let layout = self.weight_layout();
        let detail = |msg: String| Error::WeightMismatch {
            arch: self.id.to_string(),
            detail: msg,
        };
        if bundle.len() != layout.len() {
            return Err(detail(format!(
                "bundle has {} tensors, expected {}",
                bundle.len(),
                layout.len()
            )));
        }
        for (name, dims) in &layout {
            let t = bundle
                .get(name)
                .ok_or_else(|| detail(format!("missing tensor '{name}'")))?;
            if t.dims() != dims.as_slice() {
                return Err(detail(format!(
                    "tensor '{name}' has dims {:?}, expected {dims:?}",
                    t.dims()
                )));
            }
        }
        Ok(())
    }
}
