//! Ordinary least squares for regression targets: deterministic
//! minimum-norm solution with an intercept.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensorio::FeatureMatrix;

const SV_RCOND: f64 = 1e-10;

/// A fitted linear model `y = w . x + intercept`.
#[derive(Debug, Clone)]
pub struct OlsModel {
    weights: Vec<f64>,
    intercept: f64,
}

impl OlsModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + self.intercept
    }

    /// Root mean squared prediction error on a labeled matrix.
    pub fn rmse(&self, x: &FeatureMatrix, y: &[f64]) -> f64 {
        let n = y.len().max(1) as f64;
        let sq: f64 = (0..x.rows())
            .map(|r| {
                let e = self.predict_row(x.row(r)) - y[r];
                e * e
            })
            .sum();
        (sq / n).sqrt()
    }
}

/// Fits minimum-norm least squares on centered data via SVD; the
/// intercept absorbs the means, so a constant regressor predicts the
/// label mean. Rank deficiency falls back to the pseudo-inverse solution
/// (no seeds, fully deterministic).
pub fn train_ols(x: &FeatureMatrix, y: &[f64]) -> Result<OlsModel> {
    if x.rows() == 0 || x.rows() != y.len() {
        return Err(Error::BadDecode(format!(
            "ols needs matching nonempty rows: {} rows, {} labels",
            x.rows(),
            y.len()
        )));
    }
    let n = x.rows();
    let p = x.cols();
    let xd = x.to_dmatrix();
    let x_mean = DVector::from_fn(p, |c, _| xd.column(c).sum() / n as f64);
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let xc = DMatrix::from_fn(n, p, |r, c| xd[(r, c)] - x_mean[c]);
    let yc = DVector::from_fn(n, |r, _| y[r] - y_mean);

    // w = V S^+ U^T yc
    let svd = xc.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let uty = u.transpose() * &yc;
    let mut coeffs = DVector::zeros(svd.singular_values.len());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > SV_RCOND * smax {
            coeffs[i] = uty[i] / s;
        }
    }
    let w = vt.transpose() * coeffs;

    let intercept = y_mean - w.iter().zip(x_mean.iter()).map(|(a, b)| a * b).sum::<f64>();
    Ok(OlsModel {
        weights: w.iter().copied().collect(),
        intercept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line_is_recovered() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let x = FeatureMatrix::new(4, 1, xs.to_vec()).unwrap();
        let y: Vec<f64> = xs.iter().map(|v| 2.0 * v + 1.0).collect();
        let model = train_ols(&x, &y).unwrap();
        assert_relative_eq!(model.weights()[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(model.intercept(), 1.0, epsilon = 1e-10);
        assert!(model.rmse(&x, &y) < 1e-10);
    }

    #[test]
    fn constant_regressor_predicts_label_mean() {
        let x = FeatureMatrix::new(4, 1, vec![3.0; 4]).unwrap();
        let y = [1.0, 2.0, 3.0, 6.0];
        let model = train_ols(&x, &y).unwrap();
        let mean = 3.0;
        for r in 0..4 {
            assert_relative_eq!(model.predict_row(x.row(r)), mean, epsilon = 1e-12);
        }
        // RMSE of the mean predictor is the population std of y.
        let std = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 4.0).sqrt();
        assert_relative_eq!(model.rmse(&x, &y), std, epsilon = 1e-12);
    }

    #[test]
    fn residual_is_orthogonal_to_column_space() {
        let n = 20;
        let p = 4;
        let data: Vec<f64> = (0..n * p)
            .map(|i| (((i * 31) % 23) as f64 - 11.0) / 7.0)
            .collect();
        let x = FeatureMatrix::new(n, p, data).unwrap();
        let y: Vec<f64> = (0..n).map(|i| ((i * 7 % 13) as f64) / 3.0 - 1.0).collect();
        let model = train_ols(&x, &y).unwrap();
        let residual: Vec<f64> = (0..n).map(|r| y[r] - model.predict_row(x.row(r))).collect();
        // Against every column and the intercept column of ones.
        for c in 0..p {
            let dot: f64 = (0..n).map(|r| x.at(r, c) * residual[r]).sum();
            assert!(dot.abs() < 1e-8, "column {c}: {dot}");
        }
        let sum: f64 = residual.iter().sum();
        assert!(sum.abs() < 1e-8);
    }

    #[test]
    fn rank_deficient_systems_use_minimum_norm() {
        // Duplicate column: infinitely many LS solutions; the pseudo
        // inverse splits the weight evenly.
        let x = FeatureMatrix::new(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        let y = [2.0, 4.0, 6.0];
        let model = train_ols(&x, &y).unwrap();
        assert_relative_eq!(model.weights()[0], model.weights()[1], epsilon = 1e-10);
        assert!(model.rmse(&x, &y) < 1e-10);
    }
}
