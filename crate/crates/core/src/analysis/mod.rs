//! Violation metrics and variable orderings.

pub mod metrics;
pub mod ordering;

use thiserror::Error;

pub use metrics::{metrics, MetricsReport};
pub use ordering::{
    format_ordering_file, ordering_corr, ordering_kde, ordering_random, parse_ordering_file, OrderMethod,
    VariableOrdering,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("{which} data has {got} rows, need at least {need}")]
    TooFewRows { which: &'static str, got: usize, need: usize },
    #[error("{which} data: row {row} has the wrong number of columns")]
    RaggedRow { which: &'static str, row: usize },
    #[error("{which} data contains non-finite values")]
    NonFinite { which: &'static str },
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("bad ordering: {0}")]
    BadOrdering(String),
}
