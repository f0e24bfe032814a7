//! Representation-similarity measures between feature matrices computed
//! over the same examples: linear CKA, linear-regression R^2, CCA and
//! SVCCA.

mod cca;
mod cka;
mod grid;
mod linreg;

pub use cca::{cca_similarities, svcca_similarities, variance_rank, CcaValues};
pub use cka::{cka_feature_form, cka_gram_form, linear_cka};
pub use grid::{mean_grids, similarity_grid, NamedMatrix, NoiseBaseline, SimilarityGrid};
pub use linreg::linreg_r2;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensorio::FeatureMatrix;

/// The available similarity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    Cka,
    LrR2,
    CcaR2,
    CcaRho,
    SvccaR2,
    SvccaRho,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Cka,
        Measure::LrR2,
        Measure::CcaR2,
        Measure::CcaRho,
        Measure::SvccaR2,
        Measure::SvccaRho,
    ];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            Measure::Cka => "cka",
            Measure::LrR2 => "lr_r2",
            Measure::CcaR2 => "cca_r2",
            Measure::CcaRho => "cca_rho",
            Measure::SvccaR2 => "svcca_r2",
            Measure::SvccaRho => "svcca_rho",
        };
        write!(f, "{token}")
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cka" => Ok(Measure::Cka),
            "lr_r2" => Ok(Measure::LrR2),
            "cca_r2" => Ok(Measure::CcaR2),
            "cca_rho" => Ok(Measure::CcaRho),
            "svcca_r2" => Ok(Measure::SvccaR2),
            "svcca_rho" => Ok(Measure::SvccaRho),
            other => Err(Error::BadFeatureSpec(format!("unknown measure '{other}'"))),
        }
    }
}

/// One similarity value with the names of the compared feature sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub measure: Measure,
    pub value: f64,
    pub x_name: String,
    pub y_name: String,
}

/// Two column-centered feature matrices over the same `n` examples.
#[derive(Debug, Clone)]
pub struct CenteredPair {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl CenteredPair {
    /// Centers both matrices; they must share `n >= 2`.
    pub fn new(x: &FeatureMatrix, y: &FeatureMatrix) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::ExampleMismatch(format!(
                "X has {} rows, Y has {}",
                x.rows(),
                y.rows()
            )));
        }
        if x.rows() < 2 {
            return Err(Error::BadMatrix("similarity needs n >= 2 examples".into()));
        }
        let mut xm = x.to_dmatrix();
        let mut ym = y.to_dmatrix();
        center_in_place(&mut xm);
        center_in_place(&mut ym);
        Ok(Self { x: xm, y: ym })
    }

    pub fn from_dmatrices(mut x: DMatrix<f64>, mut y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::ExampleMismatch("row counts differ".into()));
        }
        if x.nrows() < 2 {
            return Err(Error::BadMatrix("similarity needs n >= 2 examples".into()));
        }
        center_in_place(&mut x);
        center_in_place(&mut y);
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// Evaluates one measure on this pair.
    pub fn evaluate(&self, measure: Measure) -> Result<f64> {
        Ok(match measure {
            Measure::Cka => linear_cka(self)?,
            Measure::LrR2 => linreg_r2(self)?,
            Measure::CcaR2 => cca_similarities(self)?.r2,
            Measure::CcaRho => cca_similarities(self)?.rho,
            Measure::SvccaR2 => svcca_similarities(self, 0.99)?.r2,
            Measure::SvccaRho => svcca_similarities(self, 0.99)?.rho,
        })
    }
}

/// Subtracts each column's mean; idempotent.
pub fn center_columns(m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if m.rows() < 2 {
        return Err(Error::BadMatrix("centering needs n >= 2 rows".into()));
    }
    let mut d = m.to_dmatrix();
    center_in_place(&mut d);
    FeatureMatrix::from_dmatrix(&d)
}

pub(crate) fn center_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows() as f64;
    for c in 0..m.ncols() {
        let mean = m.column(c).sum() / n;
        for r in 0..m.nrows() {
            m[(r, c)] -= mean;
        }
    }
}
