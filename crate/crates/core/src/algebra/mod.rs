//! Exact linear expressions, inequalities and disjunctive constraints.

mod constraint;
mod expr;
mod inequality;
pub mod rational;
mod set;
mod subsume;

use thiserror::Error;

pub use constraint::{Constraint, PartialConstraint, UnivariateIneq};
pub use expr::LinearExpr;
pub use inequality::{Inequality, Occurrence};
pub use rational::Rational;
pub use set::{ConstraintSet, Satisfaction, SetChecker};
pub use subsume::{prune_subsumed, SubsumptionIndex};

/// Zero-based variable index (position of the feature in a sample).
pub type Var = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {var} out of range for dimension {dimension}")]
    VariableOutOfRange { var: Var, dimension: usize },
    #[error("variable {0} is bound but must stay free")]
    FreeVariableBound(Var),
    #[error("variable {0} is neither bound nor free")]
    UnboundVariable(Var),
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
}
