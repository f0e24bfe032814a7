//! Forward-only convolution building blocks in f32.

use crate::error::{Error, Result};
use crate::tensorio::Tensor;

/// A `[C, H, W]` activation map, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl FeatureMap {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_data(channels: usize, height: usize, width: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), channels * height * width);
        Self {
            channels,
            height,
            width,
            data,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    #[inline]
    pub fn at(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn at_mut(&mut self, c: usize, y: usize, x: usize) -> &mut f32 {
        &mut self.data[(c * self.height + y) * self.width + x]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }
}

/// Output length of one convolution axis, or None when the (dilated)
/// kernel does not fit the padded input.
pub fn conv_out_len(input: usize, kernel: usize, stride: usize, padding: usize, dilation: usize) -> Option<usize> {
    let span = dilation * (kernel - 1) + 1;
    let padded = input + 2 * padding;
    if padded < span {
        return None;
    }
    Some((padded - span) / stride + 1)
}

/// Cross-correlation with zero padding.
///
/// `weight` dims are `[Cout, Cin, kh, kw]`, `bias` (when present) `[Cout]`.
pub fn conv2d(
    input: &FeatureMap,
    weight: &Tensor,
    bias: Option<&Tensor>,
    stride: (usize, usize),
    padding: (usize, usize),
    dilation: (usize, usize),
) -> Result<FeatureMap> {
    let (cin, h, w) = input.dims();
    let wd = weight.dims();
    if wd.len() != 4 || wd[1] != cin {
        return Err(Error::BadGeometry(format!(
            "weight dims {wd:?} do not fit input with {cin} channels"
        )));
    }
    let (cout, kh, kw) = (wd[0], wd[2], wd[3]);
    let oh = conv_out_len(h, kh, stride.0, padding.0, dilation.0);
    let ow = conv_out_len(w, kw, stride.1, padding.1, dilation.1);
    let (oh, ow) = match (oh, ow) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::BadGeometry(format!(
                "kernel ({kh}, {kw}) with dilation {dilation:?} exceeds padded input ({h}, {w})"
            )))
        }
    };
    if let Some(b) = bias {
        if b.dims() != [cout] {
            return Err(Error::BadGeometry(format!(
                "bias dims {:?}, expected [{cout}]",
                b.dims()
            )));
        }
    }

    let wdata = weight.data();
    let mut out = FeatureMap::zeros(cout, oh, ow);
    for co in 0..cout {
        let b = bias.map_or(0.0, |b| b.data()[co]);
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = b;
                for ci in 0..cin {
                    let wbase = ((co * cin + ci) * kh) * kw;
                    for ky in 0..kh {
                        let iy = (oy * stride.0 + ky * dilation.0) as isize - padding.0 as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..kw {
                            let ix =
                                (ox * stride.1 + kx * dilation.1) as isize - padding.1 as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            acc += wdata[wbase + ky * kw + kx]
                                * input.at(ci, iy as usize, ix as usize);
                        }
                    }
                }
                *out.at_mut(co, oy, ox) = acc;
            }
        }
    }
    Ok(out)
}

/// Inference batch normalization with stored statistics:
/// `y = gamma * (x - mean) / sqrt(var + eps) + beta`, per channel.
pub fn batchnorm_infer(
    input: &FeatureMap,
    gamma: &[f32],
    beta: &[f32],
    running_mean: &[f32],
    running_var: &[f32],
    eps: f32,
) -> Result<FeatureMap> {
    let (c, h, w) = input.dims();
    for params in [gamma, beta, running_mean, running_var] {
        if params.len() != c {
            return Err(Error::BadGeometry(format!(
                "batchnorm parameter length {} for {c} channels",
                params.len()
            )));
        }
    }
    if let Some(v) = running_var.iter().find(|&&v| v < 0.0) {
        return Err(Error::BadGeometry(format!("negative running variance {v}")));
    }
    let mut out = input.clone();
    for ch in 0..c {
        let scale = gamma[ch] / (running_var[ch] + eps).sqrt();
        let shift = beta[ch] - running_mean[ch] * scale;
        let base = ch * h * w;
        for v in &mut out.data_mut()[base..base + h * w] {
            *v = *v * scale + shift;
        }
    }
    Ok(out)
}

/// Elementwise max(x, 0).
pub fn relu(input: &mut FeatureMap) {
    for v in input.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Non-overlapping max pooling with floor semantics (trailing rows and
/// columns that do not fill a window are dropped).
pub fn maxpool2d(input: &FeatureMap, kernel: (usize, usize), stride: (usize, usize)) -> FeatureMap {
    let (c, h, w) = input.dims();
    let oh = if h < kernel.0 { 0 } else { (h - kernel.0) / stride.0 + 1 };
    let ow = if w < kernel.1 { 0 } else { (w - kernel.1) / stride.1 + 1 };
    let mut out = FeatureMap::zeros(c, oh, ow);
    for ch in 0..c {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut m = f32::NEG_INFINITY;
                for ky in 0..kernel.0 {
                    for kx in 0..kernel.1 {
                        m = m.max(input.at(ch, oy * stride.0 + ky, ox * stride.1 + kx));
                    }
                }
                *out.at_mut(ch, oy, ox) = m;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(name: &str, dims: Vec<usize>, data: Vec<f32>) -> Tensor {
        Tensor::new(name, dims, data).unwrap()
    }

    #[test]
    fn one_by_one_conv_is_affine() {
        let input = FeatureMap::from_data(1, 1, 1, vec![3.0]);
        let weight = t("w", vec![1, 1, 1, 1], vec![2.0]);
        let bias = t("b", vec![1], vec![0.5]);
        let out = conv2d(&input, &weight, Some(&bias), (1, 1), (0, 0), (1, 1)).unwrap();
        assert_eq!(out.data(), &[6.5]);
    }

    #[test]
    fn delta_kernel_is_identity() {
        let data: Vec<f32> = (0..36).map(|i| i as f32 * 0.25 - 4.0).collect();
        let input = FeatureMap::from_data(1, 6, 6, data.clone());
        let mut k = vec![0.0; 9];
        k[4] = 1.0;
        let weight = t("w", vec![1, 1, 3, 3], k);
        let out = conv2d(&input, &weight, None, (1, 1), (1, 1), (1, 1)).unwrap();
        assert_eq!(out.dims(), (1, 6, 6));
        assert_eq!(out.data(), data.as_slice());
    }

    #[test]
    fn matches_quadruple_loop_oracle() {
        // Pseudo-random but deterministic input and kernel; oracle
        // accumulates in f64 with explicit padding arithmetic.
        let input_data: Vec<f32> = (0..64).map(|i| ((i * 37 % 23) as f32 - 11.0) / 7.0).collect();
        let input = FeatureMap::from_data(1, 8, 8, input_data);
        let wdata: Vec<f32> = (0..18).map(|i| ((i * 13 % 19) as f32 - 9.0) / 5.0).collect();
        let weight = t("w", vec![2, 1, 3, 3], wdata.clone());
        let bias = t("b", vec![2], vec![0.3, -0.7]);
        let (stride, padding, dilation) = ((2usize, 1usize), (1usize, 0usize), (1usize, 1usize));
        let out = conv2d(&input, &weight, Some(&bias), stride, padding, dilation).unwrap();

        let (oh, ow) = (4, 6);
        assert_eq!(out.dims(), (2, oh, ow));
        for co in 0..2 {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = [0.3f64, -0.7][co];
                    for ky in 0..3 {
                        for kx in 0..3 {
                            let iy = (oy * stride.0 + ky) as isize - padding.0 as isize;
                            let ix = (ox * stride.1 + kx) as isize - padding.1 as isize;
                            if (0..8).contains(&iy) && (0..8).contains(&ix) {
                                acc += wdata[(co * 9 + ky * 3 + kx) as usize] as f64
                                    * input.at(0, iy as usize, ix as usize) as f64;
                            }
                        }
                    }
                    let got = out.at(co, oy, ox) as f64;
                    assert!((got - acc).abs() < 1e-5, "({co},{oy},{ox}): {got} vs {acc}");
                }
            }
        }
    }

    #[test]
    fn oversized_kernel_is_rejected() {
        let input = FeatureMap::zeros(1, 3, 3);
        let weight = t("w", vec![1, 1, 5, 5], vec![0.0; 25]);
        let err = conv2d(&input, &weight, None, (1, 1), (0, 0), (1, 1)).unwrap_err();
        assert!(matches!(err, Error::BadGeometry(_)));
    }

    #[test]
    fn batchnorm_untrained_defaults() {
        let input = FeatureMap::from_data(2, 1, 2, vec![1.0, -2.0, 3.0, 0.5]);
        let out = batchnorm_infer(&input, &[1.0; 2], &[0.0; 2], &[0.0; 2], &[1.0; 2], 1e-5).unwrap();
        let scale = 1.0 / (1.0f32 + 1e-5).sqrt();
        for (o, i) in out.data().iter().zip(input.data()) {
            assert!((o - i * scale).abs() < 1e-7);
        }
    }

    #[test]
    fn batchnorm_zero_gamma_gives_beta() {
        let input = FeatureMap::from_data(1, 2, 2, vec![5.0, -1.0, 2.0, 9.0]);
        let out = batchnorm_infer(&input, &[0.0], &[0.25], &[0.0], &[1.0], 1e-5).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn batchnorm_matches_scalar_formula() {
        let input = FeatureMap::from_data(3, 1, 2, vec![0.1, -0.4, 2.0, 1.0, -3.0, 0.0]);
        let gamma = [1.5, -0.5, 2.0];
        let beta = [0.1, 0.2, -0.3];
        let mean = [0.05, -1.0, 0.4];
        let var = [0.9, 2.0, 0.1];
        let out = batchnorm_infer(&input, &gamma, &beta, &mean, &var, 1e-5).unwrap();
        for c in 0..3 {
            for x in 0..2 {
                let expect =
                    gamma[c] * (input.at(c, 0, x) - mean[c]) / (var[c] + 1e-5).sqrt() + beta[c];
                assert!((out.at(c, 0, x) - expect).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn batchnorm_rejects_negative_variance() {
        let input = FeatureMap::zeros(1, 1, 1);
        let err = batchnorm_infer(&input, &[1.0], &[0.0], &[0.0], &[-0.1], 1e-5).unwrap_err();
        assert!(matches!(err, Error::BadGeometry(_)));
    }

    #[test]
    fn maxpool_basics() {
        let input = FeatureMap::from_data(1, 2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let out = maxpool2d(&input, (2, 2), (2, 2));
        assert_eq!(out.dims(), (1, 1, 1));
        assert_eq!(out.data(), &[4.0]);

        let big = FeatureMap::zeros(3, 128, 128);
        assert_eq!(maxpool2d(&big, (2, 2), (2, 2)).dims(), (3, 64, 64));

        let odd = FeatureMap::from_data(1, 5, 5, (0..25).map(|i| i as f32).collect());
        let pooled = maxpool2d(&odd, (2, 2), (2, 2));
        assert_eq!(pooled.dims(), (1, 2, 2));
        // trailing row/col dropped: max of {0,1,5,6} etc.
        assert_eq!(pooled.data(), &[6.0, 8.0, 16.0, 18.0]);
    }

    #[test]
    fn conv_out_len_formula() {
        assert_eq!(conv_out_len(128, 5, 1, 0, 1), Some(124));
        assert_eq!(conv_out_len(62, 5, 3, 3, 1), Some(22));
        assert_eq!(conv_out_len(11, 5, 2, 0, 1), Some(4));
        assert_eq!(conv_out_len(128, 5, 1, 0, 3), Some(116));
        assert_eq!(conv_out_len(3, 5, 1, 0, 1), None);
    }
}
