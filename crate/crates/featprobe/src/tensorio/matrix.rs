//! Feature matrices: n examples x p dimensions of f64 values.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensorio::{Tensor, TensorBundle};

/// Row-major matrix of example feature rows, with optional column names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    col_names: Option<Vec<String>>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major data, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadMatrix(format!(
                "data length {} != {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadMatrix(format!(
                "non-finite value at row {}, col {}",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self {
            rows,
            cols,
            data,
            col_names: None,
        })
    }

    /// Stacks per-example feature rows; all rows must share a length.
    pub fn from_rows(feature_rows: &[Vec<f64>]) -> Result<Self> {
        let rows = feature_rows.len();
        let cols = feature_rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for (i, r) in feature_rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::BadMatrix(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows, cols, data)
    }

    pub fn with_col_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::BadMatrix(format!(
                "{} column names for {} columns",
                names.len(),
                self.cols
            )));
        }
        self.col_names = Some(names);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn col_names(&self) -> Option<&[String]> {
        self.col_names.as_deref()
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
            col_names: self.col_names.clone(),
        }
    }

    /// Horizontal concatenation of feature blocks over the same examples.
    pub fn hstack(blocks: &[&FeatureMatrix]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::BadMatrix("hstack of zero blocks".into()));
        }
        let rows = blocks[0].rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::ExampleMismatch(
                "hstack blocks disagree on row count".into(),
            ));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        let names = blocks
            .iter()
            .map(|b| {
                b.col_names
                    .clone()
                    .unwrap_or_else(|| (0..b.cols).map(|c| format!("f{c}")).collect())
            })
            .collect::<Vec<_>>()
            .concat();
        Self::new(rows, cols, data)?.with_col_names(names)
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        Self::new(m.nrows(), m.ncols(), data)
    }

    /// Packs the matrix as an f32 tensor named `name`, dims `[n, p]`.
    pub fn to_tensor(&self, name: &str) -> Result<Tensor> {
        Tensor::new(
            name,
            vec![self.rows, self.cols],
            self.data.iter().map(|&v| v as f32).collect(),
        )
    }

    /// Reads a `[n, p]` tensor from a bundle back into a matrix.
    pub fn from_bundle(bundle: &TensorBundle, name: &str) -> Result<Self> {
        let t = bundle.get(name).ok_or_else(|| {
            Error::BadMatrix(format!("bundle has no tensor named '{name}'"))
        })?;
        if t.dims().len() != 2 {
            return Err(Error::BadMatrix(format!(
                "tensor '{name}' has dims {:?}, expected [n, p]",
                t.dims()
            )));
        }
        Self::new(
            t.dims()[0],
            t.dims()[1],
            t.data().iter().map(|&v| v as f64).collect(),
        )
    }

    /// RFC-4180 CSV with a header row of column names.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header: Vec<String> = match &self.col_names {
            Some(names) => names.iter().map(|n| csv_field(n)).collect(),
            None => (0..self.cols).map(|c| format!("f{c}")).collect(),
        };
        writeln!(w, "{}", header.join(","))?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Quotes a CSV field when it contains a comma, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
