//! CCA and SVCCA similarities.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::simlab::linreg::orthonormal_basis;
use crate::simlab::CenteredPair;

/// The squared-correlation and mean-correlation variants of one CCA-style
/// measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcaValues {
    pub r2: f64,
    pub rho: f64,
}

/// CCA similarities of a centered pair:
/// `R^2 = ||Q_Y^T Q_X||_F^2 / p1`, `rho = ||Q_Y^T Q_X||_* / p1`,
/// where `p1` is X's column count and the bases come from rank-revealing
/// QR (rank deficiency truncates the basis, the normalization keeps p1).
pub fn cca_similarities(pair: &CenteredPair) -> Result<CcaValues> {
    let qx = orthonormal_basis(pair.x())?;
    let qy = orthonormal_basis(pair.y())?;
    let p1 = pair.x().ncols() as f64;
    let overlap = qy.transpose() * qx;
    let svals = clipped_singular_values(&overlap);
    Ok(CcaValues {
        r2: svals.iter().map(|s| s * s).sum::<f64>() / p1,
        rho: svals.iter().sum::<f64>() / p1,
    })
}

/// SVCCA: each side is truncated to the smallest singular prefix holding
/// at least `variance_keep` of the squared-singular-value mass, then the
/// singular subspaces are compared:
/// `R^2 = ||U_Y^T U_X||_F^2 / min(d_X, d_Y)` and the nuclear-norm analog.
pub fn svcca_similarities(pair: &CenteredPair, variance_keep: f64) -> Result<CcaValues> {
    let ux = singular_prefix(pair.x(), variance_keep)?;
    let uy = singular_prefix(pair.y(), variance_keep)?;
    let d = ux.ncols().min(uy.ncols()) as f64;
    let overlap = uy.transpose() * ux;
    let svals = clipped_singular_values(&overlap);
    Ok(CcaValues {
        r2: svals.iter().map(|s| s * s).sum::<f64>() / d,
        rho: svals.iter().sum::<f64>() / d,
    })
}

/// The smallest prefix length whose squared singular values reach
/// `keep` of the total squared mass. Values are assumed sorted
/// descending.
pub fn variance_rank(singular_values: &[f64], keep: f64) -> usize {
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    if total <= 0.0 {
        return 0;
    }
    let mut acc = 0.0;
    for (i, s) in singular_values.iter().enumerate() {
        acc += s * s;
        if acc >= keep * total {
            return i + 1;
        }
    }
    singular_values.len()
}

/// Left singular vectors spanning the `variance_keep` prefix.
fn singular_prefix(m: &DMatrix<f64>, variance_keep: f64) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, false);
    let svals: Vec<f64> = svd.singular_values.iter().copied().collect();
    let d = variance_rank(&svals, variance_keep);
    if d == 0 {
        return Err(Error::DegenerateSimilarity("zero matrix in SVCCA".into()));
    }
    let u = svd.u.expect("u requested");
    Ok(u.columns(0, d).into_owned())
}

/// Singular values of the (small) overlap matrix, clipped into [0, 1] to
/// absorb roundoff.
fn clipped_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .map(|&s| s.clamp(0.0, 1.0))
        .collect()
}
