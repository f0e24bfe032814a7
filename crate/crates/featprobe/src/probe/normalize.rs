//! Per-column z-normalization fitted on the training split.

use crate::error::{Error, Result};
use crate::tensorio::FeatureMatrix;

const CONSTANT_STD: f64 = 1e-8;

/// Column means and standard deviations of a training split. Columns with
/// std below 1e-8 are marked constant and map to 0 after transform.
#[derive(Debug, Clone)]
pub struct Normalizer {
    mean: Vec<f64>,
    std: Vec<f64>,
    constant: Vec<bool>,
}

impl Normalizer {
    /// Fits column statistics (population std) on the training matrix.
    pub fn fit(train: &FeatureMatrix) -> Result<Self> {
        if train.rows() == 0 || train.cols() == 0 {
            return Err(Error::BadMatrix("cannot fit normalizer on empty matrix".into()));
        }
        let n = train.rows() as f64;
        let p = train.cols();
        let mut mean = vec![0.0; p];
        for r in 0..train.rows() {
            for (m, v) in mean.iter_mut().zip(train.row(r)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; p];
        for r in 0..train.rows() {
            for (c, v) in train.row(r).iter().enumerate() {
                let d = v - mean[c];
                var[c] += d * d;
            }
        }
        let std: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();
        let constant = std.iter().map(|&s| s < CONSTANT_STD).collect();
        Ok(Self { mean, std, constant })
    }

    /// Applies `(x - mean) / std`; constant columns become 0.
    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        if m.cols() != self.mean.len() {
            return Err(Error::BadMatrix(format!(
                "normalizer fitted on {} columns, got {}",
                self.mean.len(),
                m.cols()
            )));
        }
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for r in 0..m.rows() {
            for (c, v) in m.row(r).iter().enumerate() {
                data.push(if self.constant[c] {
                    0.0
                } else {
                    (v - self.mean[c]) / self.std[c]
                });
            }
        }
        FeatureMatrix::new(m.rows(), m.cols(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_column() {
        let train = FeatureMatrix::new(2, 1, vec![0.0, 2.0]).unwrap();
        let norm = Normalizer::fit(&train).unwrap();
        let out = norm.transform(&train).unwrap();
        assert_eq!(out.data(), &[-1.0, 1.0]);
    }

    #[test]
    fn constant_columns_map_to_zero() {
        let train = FeatureMatrix::new(3, 2, vec![5.0, 1.0, 5.0, 2.0, 5.0, 3.0]).unwrap();
        let norm = Normalizer::fit(&train).unwrap();
        let out = norm.transform(&train).unwrap();
        for r in 0..3 {
            assert_eq!(out.at(r, 0), 0.0);
        }
    }

    #[test]
    fn fit_set_is_standardized() {
        let data: Vec<f64> = (0..60).map(|i| ((i * 13) % 17) as f64 * 0.7 - 3.0).collect();
        let train = FeatureMatrix::new(12, 5, data).unwrap();
        let norm = Normalizer::fit(&train).unwrap();
        let out = norm.transform(&train).unwrap();
        for c in 0..5 {
            let mean: f64 = (0..12).map(|r| out.at(r, c)).sum::<f64>() / 12.0;
            let var: f64 = (0..12).map(|r| out.at(r, c).powi(2)).sum::<f64>() / 12.0
                - mean * mean;
            assert!(mean.abs() < 1e-9, "col {c} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-6, "col {c} std {}", var.sqrt());
        }
    }

    #[test]
    fn column_count_mismatch_is_rejected() {
        let train = FeatureMatrix::new(2, 2, vec![0.0; 4]).unwrap();
        let other = FeatureMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        let norm = Normalizer::fit(&train).unwrap();
        assert!(norm.transform(&other).is_err());
    }
}
