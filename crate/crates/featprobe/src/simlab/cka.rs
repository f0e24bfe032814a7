//! Linear centered kernel alignment.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::simlab::CenteredPair;

/// Linear CKA of a centered pair:
/// `||Y^T X||_F^2 / (||X^T X||_F * ||Y^T Y||_F)`.
///
/// When both feature counts exceed `n` the mathematically identical Gram
/// form `tr(Kx Ky) / sqrt(tr(Kx^2) tr(Ky^2))` with `K = M M^T` is cheaper
/// and used instead.
pub fn linear_cka(pair: &CenteredPair) -> Result<f64> {
    let (x, y) = (pair.x(), pair.y());
    let n = x.nrows();
    check_nondegenerate(x, "X")?;
    check_nondegenerate(y, "Y")?;
    if x.ncols().min(y.ncols()) > n {
        Ok(cka_gram_form(x, y))
    } else {
        Ok(cka_feature_form(x, y))
    }
}

/// Feature-space route.
pub fn cka_feature_form(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let cross = y.transpose() * x;
    let xx = x.transpose() * x;
    let yy = y.transpose() * y;
    sq_frobenius(&cross) / (sq_frobenius(&xx).sqrt() * sq_frobenius(&yy).sqrt())
}

/// Gram-matrix route.
pub fn cka_gram_form(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let kx = x * x.transpose();
    let ky = y * y.transpose();
    let cross = trace_product(&kx, &ky);
    cross / (trace_product(&kx, &kx).sqrt() * trace_product(&ky, &ky).sqrt())
}

fn sq_frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

/// `tr(A B)` for symmetric same-size matrices.
fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn check_nondegenerate(m: &DMatrix<f64>, side: &str) -> Result<()> {
    if m.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSimilarity(format!(
            "{side} has zero variance after centering"
        )));
    }
    Ok(())
}
