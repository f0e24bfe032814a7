//! Decoding harness: split handling, per-seed training, aggregate
//! reports, feature concatenation and the cross-task matrix.

use crate::error::{Error, Result};
use crate::probe::logreg::{eval_classifier, train_logreg, LogRegConfig};
use crate::probe::normalize::Normalizer;
use crate::probe::ols::train_ols;
use crate::tensorio::{FeatureMatrix, TaskKind};

/// Which error statistic a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Accuracy,
    Rmse,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::Accuracy => write!(f, "accuracy"),
            MetricKind::Rmse => write!(f, "rmse"),
        }
    }
}

/// Train/test row indices into a full feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Aggregate decode result for one (feature set, task) pair.
#[derive(Debug, Clone)]
pub struct DecodeReport {
    pub feature_name: String,
    pub task: String,
    pub metric: MetricKind,
    /// (seed, value) per run; a single entry for deterministic solvers.
    pub per_seed: Vec<(u64, f64)>,
    pub mean: f64,
    /// Population standard deviation over seeds.
    pub std: f64,
    /// Majority-class (train split) accuracy for classification,
    /// train-mean-prediction RMSE for regression.
    pub baseline: f64,
    /// Confusion counts summed over seeds (classification only); row sums
    /// equal per-class test counts times the number of seeds.
    pub confusion: Option<Vec<Vec<usize>>>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Interprets task labels as 0-based class indices.
fn class_labels(labels: &[f64]) -> Result<(Vec<usize>, usize)> {
    let mut classes = Vec::with_capacity(labels.len());
    let mut max = 0usize;
    for &v in labels {
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::BadDecode(format!(
                "classification label {v} is not a non-negative integer"
            )));
        }
        let c = v as usize;
        max = max.max(c);
        classes.push(c);
    }
    Ok((classes, max + 1))
}

fn gather<T: Copy>(values: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| values[i]).collect()
}

/// Decodes a classification task: z-normalize on the train split, train
/// one logistic regression per shuffle seed, evaluate on the test split.
pub fn decode_classification(
    feature_name: &str,
    task: &str,
    features: &FeatureMatrix,
    labels: &[f64],
    split: &SplitIndices,
    cfg: &LogRegConfig,
    seeds: &[u64],
) -> Result<DecodeReport> {
    if features.rows() != labels.len() {
        return Err(Error::BadDecode("features/labels disagree on n".into()));
    }
    if seeds.is_empty() {
        return Err(Error::BadDecode("seed list is empty".into()));
    }
    let (classes, n_classes) = class_labels(labels)?;
    let train_x = features.select_rows(&split.train);
    let test_x = features.select_rows(&split.test);
    let train_y = gather(&classes, &split.train);
    let test_y = gather(&classes, &split.test);

    let normalizer = Normalizer::fit(&train_x)?;
    let train_x = normalizer.transform(&train_x)?;
    let test_x = normalizer.transform(&test_x)?;

    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for &seed in seeds {
        let run_cfg = LogRegConfig { seed, ..*cfg };
        let model = train_logreg(&train_x, &train_y, n_classes, &run_cfg)?;
        let eval = eval_classifier(&model, &test_x, &test_y)?;
        per_seed.push((seed, eval.accuracy));
        for (acc_row, row) in confusion.iter_mut().zip(&eval.confusion) {
            for (a, v) in acc_row.iter_mut().zip(row) {
                *a += v;
            }
        }
    }

    let values: Vec<f64> = per_seed.iter().map(|&(_, v)| v).collect();
    let (mean, std) = mean_std(&values);
    Ok(DecodeReport {
        feature_name: feature_name.to_string(),
        task: task.to_string(),
        metric: MetricKind::Accuracy,
        per_seed,
        mean,
        std,
        baseline: majority_class_share(&train_y, n_classes),
        confusion: Some(confusion),
    })
}

/// Baseline accuracy: the train-split share of the most common class.
fn majority_class_share(train_y: &[usize], n_classes: usize) -> f64 {
    let mut counts = vec![0usize; n_classes];
    for &c in train_y {
        counts[c] += 1;
    }
    counts.into_iter().max().unwrap_or(0) as f64 / train_y.len().max(1) as f64
}

/// Decodes a regression task with a single deterministic OLS fit; the
/// baseline predicts the train-split mean for every test example.
pub fn decode_regression(
    feature_name: &str,
    task: &str,
    features: &FeatureMatrix,
    labels: &[f64],
    split: &SplitIndices,
) -> Result<DecodeReport> {
    if features.rows() != labels.len() {
        return Err(Error::BadDecode("features/labels disagree on n".into()));
    }
    let train_x = features.select_rows(&split.train);
    let test_x = features.select_rows(&split.test);
    let train_y = gather(labels, &split.train);
    let test_y = gather(labels, &split.test);

    let model = train_ols(&train_x, &train_y)?;
    let rmse = model.rmse(&test_x, &test_y);

    let train_mean = train_y.iter().sum::<f64>() / train_y.len().max(1) as f64;
    let baseline = (test_y.iter().map(|v| (v - train_mean) * (v - train_mean)).sum::<f64>()
        / test_y.len().max(1) as f64)
        .sqrt();

    Ok(DecodeReport {
        feature_name: feature_name.to_string(),
        task: task.to_string(),
        metric: MetricKind::Rmse,
        per_seed: vec![(0, rmse)],
        mean: rmse,
        std: 0.0,
        baseline,
        confusion: None,
    })
}

/// Horizontal concatenation of feature blocks followed by the standard
/// classification decode.
pub fn concat_decode(
    name: &str,
    task: &str,
    blocks: &[&FeatureMatrix],
    labels: &[f64],
    split: &SplitIndices,
    cfg: &LogRegConfig,
    seeds: &[u64],
) -> Result<DecodeReport> {
    if blocks.is_empty() {
        return Err(Error::BadDecode("empty block list".into()));
    }
    let stacked = FeatureMatrix::hstack(blocks)?;
    decode_classification(name, task, &stacked, labels, split, cfg, seeds)
}

/// One labeled decoding target.
#[derive(Debug, Clone)]
pub struct TaskTarget {
    pub name: String,
    pub kind: TaskKind,
    pub labels: Vec<f64>,
}

/// Decodes every target task from every source feature set: the harness
/// behind cross-task transfer studies. Reports come back in
/// source-major, target-minor order.
pub fn cross_task_matrix(
    sources: &[(String, FeatureMatrix)],
    targets: &[TaskTarget],
    split: &SplitIndices,
    cfg: &LogRegConfig,
    seeds: &[u64],
) -> Result<Vec<DecodeReport>> {
    let mut reports = Vec::with_capacity(sources.len() * targets.len());
    for (name, features) in sources {
        for target in targets {
            let report = match target.kind {
                TaskKind::Classification => decode_classification(
                    name,
                    &target.name,
                    features,
                    &target.labels,
                    split,
                    cfg,
                    seeds,
                )?,
                TaskKind::Regression => {
                    decode_regression(name, &target.name, features, &target.labels, split)?
                }
            };
            reports.push(report);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Separable 2-class toy: one informative dimension plus an index
    /// dimension, split alternating train/test.
    fn toy() -> (FeatureMatrix, Vec<f64>, SplitIndices) {
        let n = 24;
        let data: Vec<f64> = (0..n)
            .flat_map(|i| {
                let c = (i % 2) as f64;
                [c * 2.0 - 1.0 + ((i % 5) as f64) * 0.01, (i as f64) / n as f64]
            })
            .collect();
        let features = FeatureMatrix::new(n, 2, data).unwrap();
        let labels: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let split = SplitIndices {
            train: (0..n).filter(|i| i % 4 < 2).collect(),
            test: (0..n).filter(|i| i % 4 >= 2).collect(),
        };
        (features, labels, split)
    }

    fn quick_cfg() -> LogRegConfig {
        LogRegConfig {
            epochs: 50,
            ..LogRegConfig::default()
        }
    }

    #[test]
    fn separable_toy_decodes_perfectly() {
        let (features, labels, split) = toy();
        let report = decode_classification(
            "toy",
            "class",
            &features,
            &labels,
            &split,
            &quick_cfg(),
            &[0, 1, 2],
        )
        .unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.std, 0.0);
        assert_eq!(report.baseline, 0.5);
        // summed confusion row sums = per-class test counts x seeds
        let confusion = report.confusion.unwrap();
        let row_sums: Vec<usize> = confusion.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(row_sums, vec![18, 18]);
    }

    #[test]
    fn report_mean_std_match_direct_arithmetic() {
        let (features, labels, split) = toy();
        let seeds = [0u64, 1, 2, 3, 4];
        let report = decode_classification(
            "toy", "class", &features, &labels, &split, &quick_cfg(), &seeds,
        )
        .unwrap();
        let values: Vec<f64> = report.per_seed.iter().map(|&(_, v)| v).collect();
        let mean = values.iter().sum::<f64>() / 5.0;
        let std =
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 5.0).sqrt();
        assert_eq!(report.mean, mean);
        assert_eq!(report.std, std);
    }

    #[test]
    fn duplicate_blocks_keep_the_convex_optimum() {
        // Duplicated columns add no information: the separable toy stays
        // perfectly classified.
        let (features, labels, split) = toy();
        let single = decode_classification(
            "single", "class", &features, &labels, &split, &quick_cfg(), &[0],
        )
        .unwrap();
        let doubled = concat_decode(
            "doubled",
            "class",
            &[&features, &features],
            &labels,
            &split,
            &quick_cfg(),
            &[0],
        )
        .unwrap();
        assert_eq!(single.mean, 1.0);
        assert_eq!(doubled.mean, 1.0);
    }

    #[test]
    fn noise_block_preserves_separability() {
        let (features, labels, split) = toy();
        let noise = FeatureMatrix::new(
            features.rows(),
            3,
            (0..features.rows() * 3)
                .map(|i| (((i * 37) % 101) as f64 - 50.0) / 25.0)
                .collect(),
        )
        .unwrap();
        let report = concat_decode(
            "with-noise",
            "class",
            &[&features, &noise],
            &labels,
            &split,
            &quick_cfg(),
            &[0],
        )
        .unwrap();
        assert_eq!(report.mean, 1.0);
    }

    #[test]
    fn empty_block_list_is_an_error() {
        let (_, labels, split) = toy();
        assert!(concat_decode("x", "class", &[], &labels, &split, &quick_cfg(), &[0]).is_err());
    }

    #[test]
    fn regression_on_exact_line_has_zero_rmse() {
        let n = 10;
        let x = FeatureMatrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let y: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 - 2.0).collect();
        let split = SplitIndices {
            train: (0..n).filter(|i| i % 2 == 0).collect(),
            test: (0..n).filter(|i| i % 2 == 1).collect(),
        };
        let report = decode_regression("x", "value", &x, &y, &split).unwrap();
        assert!(report.mean < 1e-9);
        assert!(report.baseline > 1.0);
        assert_eq!(report.metric, MetricKind::Rmse);
    }

    #[test]
    fn cross_task_matrix_composes_single_decodes() {
        let (features, labels, split) = toy();
        let pitch: Vec<f64> = (0..features.rows()).map(|i| 100.0 + i as f64).collect();
        let sources = vec![("toy".to_string(), features.clone())];
        let targets = vec![
            TaskTarget {
                name: "class".into(),
                kind: TaskKind::Classification,
                labels: labels.clone(),
            },
            TaskTarget {
                name: "pitch".into(),
                kind: TaskKind::Regression,
                labels: pitch.clone(),
            },
        ];
        let grid = cross_task_matrix(&sources, &targets, &split, &quick_cfg(), &[0]).unwrap();
        assert_eq!(grid.len(), 2);

        let direct = decode_classification(
            "toy", "class", &features, &labels, &split, &quick_cfg(), &[0],
        )
        .unwrap();
        assert_eq!(grid[0].mean, direct.mean);
        assert_eq!(grid[0].per_seed, direct.per_seed);

        let direct_reg = decode_regression("toy", "pitch", &features, &pitch, &split).unwrap();
        assert_eq!(grid[1].mean, direct_reg.mean);
    }

    #[test]
    fn cross_task_matrix_is_reproducible() {
        let (features, labels, split) = toy();
        let sources = vec![("toy".to_string(), features)];
        let targets = vec![TaskTarget {
            name: "class".into(),
            kind: TaskKind::Classification,
            labels,
        }];
        let a = cross_task_matrix(&sources, &targets, &split, &quick_cfg(), &[0, 1]).unwrap();
        let b = cross_task_matrix(&sources, &targets, &split, &quick_cfg(), &[0, 1]).unwrap();
        assert_eq!(a[0].per_seed, b[0].per_seed);
        assert_eq!(a[0].confusion, b[0].confusion);
    }

    #[test]
    fn non_integer_class_labels_are_rejected() {
        let (features, _, split) = toy();
        let labels: Vec<f64> = (0..features.rows()).map(|i| i as f64 * 0.5).collect();
        assert!(decode_classification(
            "toy", "class", &features, &labels, &split, &quick_cfg(), &[0]
        )
        .is_err());
    }
}
