//! Applying a compiled layer to samples.

pub mod batch;
pub mod bounds;
pub mod refine;

use thiserror::Error;

pub use batch::{refine_batch, refine_rows, BatchOutput, ProvenanceRecord, RowsOutput};
pub use bounds::{boundaries, closest_bounds, Bound, Boundaries, BoundaryPair};
pub use refine::{refine, refine_with_jacobian, Provenance, RefineConfig, RefineResult, Refiner};

use crate::algebra::Var;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("constraints are unsatisfiable (witness `{0}`)")]
    Unsat(String),
    #[error("sample has {got} values, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in column {}", .var + 1)]
    NonFinite { var: Var },
    #[error("numeric failure at ordering position {}: no satisfying value for x{} (chain constraints {constraints:?})", .position + 1, .var + 1)]
    NumericFailure { position: usize, var: Var, constraints: Vec<usize> },
}

/// A refinement error tagged with its 0-based row.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("row {row}: {error}")]
pub struct RowError {
    pub row: usize,
    pub error: RefineError,
}
