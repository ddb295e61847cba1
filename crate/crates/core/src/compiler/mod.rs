//! Variable elimination by CP resolution.

pub mod artifact;
pub mod eliminate;
pub mod layer;
pub mod resolve;

use thiserror::Error;

pub use artifact::{read_artifact, write_artifact, ArtifactFile};
pub use eliminate::{close_plusplus, eliminate, partition, Budget, EliminationStep, VariablePartition};
pub use layer::{compile, validate_ordering, CompileConfig, CompiledLayer, StepStats, Verdict};
pub use resolve::cp_resolve;

use crate::algebra::Var;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("resolvent budget of {limit} exceeded while eliminating x{}", .var + 1)]
    ResolventBudget { limit: usize, var: Var },
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("invalid compiled artifact: {0}")]
    InvalidArtifact(String),
    #[error("internal compiler error: {0}")]
    Internal(String),
}
