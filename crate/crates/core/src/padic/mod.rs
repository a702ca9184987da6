//! Evaluation of the series at p-adic points of the path space.

pub mod eval;
pub mod path;

use thiserror::Error;

use crate::numeric::PadicError;

pub use eval::{
    check_good_reduction, convergence_radius, evaluate_series_at_path, least_weight_above, verify_norm_identity,
    verify_numeric_conjugacy, verify_numeric_conjugacy_with, NormIdentityReport, NormStep, NumericConjugacyReport,
    SeriesValue,
};
pub use path::{
    forward_path_search, forward_path_search_within, predicted_valuation, CoordJson, PathJson, PathPoint,
    MAX_RAMIFICATION,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("path has {have} coordinates but {needed} are needed")]
    PathTooShort { needed: usize, have: usize },
    #[error("v(w_0) = {valuation} is not above the convergence threshold {threshold}")]
    DivergenceRegion { valuation: String, threshold: String },
    #[error("no dominant root: {0}")]
    NotDominant(String),
    #[error("coordinates {0} and {next} do not satisfy the path condition", next = .0 + 1)]
    NotAPath(usize),
    #[error(transparent)]
    Padic(#[from] PadicError),
}
