//! Pairwise similarity grids with an optional random-noise baseline
//! column.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::simlab::{CenteredPair, Measure};
use crate::tensorio::{csv_field, FeatureMatrix};

/// A feature matrix with a display name and an optional example-order
/// digest for cross-artifact consistency checks.
#[derive(Debug, Clone)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: FeatureMatrix,
    pub order_digest: Option<u64>,
}

impl NamedMatrix {
    pub fn new(name: impl Into<String>, matrix: FeatureMatrix) -> Self {
        Self {
            name: name.into(),
            matrix,
            order_digest: None,
        }
    }

    pub fn with_digest(mut self, digest: u64) -> Self {
        self.order_digest = Some(digest);
        self
    }
}

/// Standard-normal baseline column configuration.
#[derive(Debug, Clone, Copy)]
pub struct NoiseBaseline {
    pub seed: u64,
    pub dims: usize,
}

/// A grid of similarity values with row/column labels.
#[derive(Debug, Clone)]
pub struct SimilarityGrid {
    pub measure: Measure,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Mat,
}

impl SimilarityGrid {
    /// RFC-4180 CSV: header row of column labels, one row per grid row.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut header = vec![self.measure.to_string()];
        header.extend(self.col_labels.iter().map(|l| csv_field(l)));
        writeln!(w, "{}", header.join(","))?;
        for (r, label) in self.row_labels.iter().enumerate() {
            let mut row = vec![csv_field(label)];
            row.extend(self.values.row(r).iter().map(|v| format!("{v}")));
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Computes the full `rows x cols` grid of pairwise similarities. All
/// matrices must share the example count (and order digest when present);
/// a noise baseline appends one standard-normal column with a recorded
/// seed.
pub fn similarity_grid(
    rows: &[NamedMatrix],
    cols: &[NamedMatrix],
    measure: Measure,
    noise: Option<NoiseBaseline>,
) -> Result<SimilarityGrid> {
    let n = rows
        .first()
        .or(cols.first())
        .map(|m| m.matrix.rows())
        .ok_or_else(|| Error::BadMatrix("empty similarity grid".into()))?;

    let mut digests = rows.iter().chain(cols).filter_map(|m| m.order_digest);
    if let Some(first) = digests.next() {
        if digests.any(|d| d != first) {
            return Err(Error::ExampleMismatch(
                "feature matrices carry different example-order digests".into(),
            ));
        }
    }
    for m in rows.iter().chain(cols) {
        if m.matrix.rows() != n {
            return Err(Error::ExampleMismatch(format!(
                "'{}' has {} examples, expected {n}",
                m.name,
                m.matrix.rows()
            )));
        }
    }

    let mut col_set: Vec<&NamedMatrix> = cols.iter().collect();
    let noise_matrix = noise.map(|nb| {
        let mut rng = ChaCha20Rng::seed_from_u64(nb.seed);
        let data: Vec<f64> = (0..n * nb.dims).map(|_| rng.sample(StandardNormal)).collect();
        NamedMatrix::new(
            format!("noise(seed={})", nb.seed),
            FeatureMatrix::new(n, nb.dims, data).expect("finite normal draws"),
        )
    });
    if let Some(nm) = &noise_matrix {
        col_set.push(nm);
    }

    let mut values = Mat::zeros(rows.len(), col_set.len());
    for (r, row) in rows.iter().enumerate() {
        for (c, col) in col_set.iter().enumerate() {
            let pair = CenteredPair::new(&row.matrix, &col.matrix)?;
            *values.at_mut(r, c) = pair.evaluate(measure)?;
        }
    }

    Ok(SimilarityGrid {
        measure,
        row_labels: rows.iter().map(|m| m.name.clone()).collect(),
        col_labels: col_set.iter().map(|m| m.name.clone()).collect(),
        values,
    })
}

/// Elementwise mean of structurally identical grids (used to average the
/// per-initialization grids).
pub fn mean_grids(grids: &[SimilarityGrid]) -> Result<SimilarityGrid> {
    let first = grids
        .first()
        .ok_or_else(|| Error::BadMatrix("mean of zero grids".into()))?;
    let mut values = Mat::zeros(first.values.rows(), first.values.cols());
    for g in grids {
        if g.row_labels != first.row_labels || g.col_labels != first.col_labels {
            return Err(Error::ExampleMismatch("grid labels differ".into()));
        }
        for (acc, v) in values.data_mut().iter_mut().zip(g.values.data()) {
            *acc += v;
        }
    }
    let k = grids.len() as f64;
    for v in values.data_mut() {
        *v /= k;
    }
    Ok(SimilarityGrid {
        measure: first.measure,
        row_labels: first.row_labels.clone(),
        col_labels: first.col_labels.clone(),
        values,
    })
}
