//! Decoding analysis: z-normalization, multiclass logistic regression
//! with SGD + momentum, OLS for regression targets, and the cross-task
//! harness.

mod harness;
mod logreg;
mod normalize;
mod ols;

pub use harness::{
    concat_decode, cross_task_matrix, decode_classification, decode_regression, DecodeReport,
    MetricKind, SplitIndices, TaskTarget,
};
pub use logreg::{
    eval_classifier, loss_and_gradient, train_logreg, ClassifierEval, LogRegConfig, LogRegModel,
};
pub use normalize::Normalizer;
pub use ols::{train_ols, OlsModel};
