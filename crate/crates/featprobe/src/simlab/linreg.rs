//! Linear-regression similarity: the fraction of X's squared norm
//! explained by projection onto Y's column space.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::simlab::CenteredPair;

/// Relative R-diagonal threshold below which rank-revealing QR drops a
/// column; concatenated hand-crafted features contain near-duplicates.
pub(crate) const QR_RANK_TOL: f64 = 1e-10;

/// `R^2_LR = ||Q_Y^T X||_F^2 / ||X||_F^2` with `Q_Y` from a
/// rank-revealing QR of Y.
pub fn linreg_r2(pair: &CenteredPair) -> Result<f64> {
    let x = pair.x();
    let x_norm_sq: f64 = x.iter().map(|v| v * v).sum();
    if x_norm_sq == 0.0 {
        return Err(Error::DegenerateSimilarity(
            "X is zero after centering".into(),
        ));
    }
    let q = orthonormal_basis(pair.y())?;
    let projected = q.transpose() * x;
    Ok(projected.iter().map(|v| v * v).sum::<f64>() / x_norm_sq)
}

/// Orthonormal basis of a matrix's column space via column-pivoted QR,
/// dropping columns whose R-diagonal falls below `QR_RANK_TOL` times the
/// leading diagonal.
pub(crate) fn orthonormal_basis(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = m.clone().col_piv_qr();
    let diag: Vec<f64> = {
        let r = qr.r();
        (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect()
    };
    let leading = diag.first().copied().unwrap_or(0.0);
    if leading == 0.0 {
        return Err(Error::DegenerateSimilarity(
            "zero-rank side in similarity computation".into(),
        ));
    }
    let rank = diag.iter().take_while(|&&d| d >= QR_RANK_TOL * leading).count();
    let q = qr.q();
    Ok(q.columns(0, rank).into_owned())
}
