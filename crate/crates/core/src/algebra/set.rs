use std::fmt;

use super::constraint::Constraint;
use super::subsume::prune_subsumed;
use super::{AlgebraError, Var};
use crate::numeric::DdForm;

/// A conjunction of constraints over `dimension` variables.
///
/// Constraints are kept sorted and duplicate-free, so iteration order (and
/// the per-constraint indices reported elsewhere) is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    dimension: usize,
    constraints: Vec<Constraint>,
}

/// Outcome of checking one sample against a [`ConstraintSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satisfaction {
    pub all: bool,
    pub per_constraint: Vec<bool>,
}

impl ConstraintSet {
    pub fn new(dimension: usize, constraints: impl IntoIterator<Item = Constraint>) -> Result<Self, AlgebraError> {
        let mut constraints: Vec<Constraint> = constraints.into_iter().collect();
        if let Some(max) = constraints.iter().filter_map(Constraint::max_var).max() {
            if max >= dimension {
                return Err(AlgebraError::VariableOutOfRange { var: max, dimension });
            }
        }
        constraints.sort();
        constraints.dedup();
        Ok(ConstraintSet { dimension, constraints })
    }

    pub fn empty(dimension: usize) -> Self {
        ConstraintSet { dimension, constraints: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.constraints.iter()
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.constraints.iter().any(|c| c.mentions(v))
    }

    /// Drops every constraint entailed clause-wise by another one.
    pub fn prune_subsumed(&mut self) {
        self.constraints = prune_subsumed(std::mem::take(&mut self.constraints));
    }

    pub fn union(&self, other: &ConstraintSet) -> Result<ConstraintSet, AlgebraError> {
        let dimension = self.dimension.max(other.dimension);
        ConstraintSet::new(dimension, self.constraints.iter().chain(other.constraints.iter()).cloned())
    }

    /// Whether `sample` satisfies every constraint within `tol`, with one
    /// verdict per constraint.
    pub fn satisfies(&self, sample: &[f64], tol: f64) -> Result<Satisfaction, AlgebraError> {
        self.checker().check(sample, tol)
    }

    /// Pre-rounds the coefficients once for repeated checks.
    pub fn checker(&self) -> SetChecker {
        SetChecker {
            dimension: self.dimension,
            constraints: self
                .constraints
                .iter()
                .map(|c| c.disjuncts().iter().map(|d| d.expr().to_dd()).collect())
                .collect(),
        }
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A [`ConstraintSet`] with double-double coefficients for fast checks.
#[derive(Clone, Debug)]
pub struct SetChecker {
    dimension: usize,
    constraints: Vec<Vec<DdForm>>,
}

impl SetChecker {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn check(&self, sample: &[f64], tol: f64) -> Result<Satisfaction, AlgebraError> {
        if sample.len() != self.dimension {
            return Err(AlgebraError::DimensionMismatch { expected: self.dimension, got: sample.len() });
        }
        let per_constraint: Vec<bool> =
            self.constraints.iter().map(|ds| ds.iter().any(|d| d.eval(sample).to_f64() >= -tol)).collect();
        Ok(Satisfaction { all: per_constraint.iter().all(|&b| b), per_constraint })
    }
}
