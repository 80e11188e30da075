//! Soft-margin SVM, repeated cross-validation and confusion reports.

mod cv;
mod model;
mod report;

pub use cv::{cross_validate, fold_features, fold_plan, stratified_folds, CvScheme, CvSettings, FeatureSelection};
pub use model::{
    predict, solve_dual, train, train_with, DualSolution, KernelKind, KernelSpec, SolverOptions, TrainedModel,
};
pub use report::ConfusionReport;
