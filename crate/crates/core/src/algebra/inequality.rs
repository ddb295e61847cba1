use std::fmt;

use num_traits::{One, Signed};

use super::expr::LinearExpr;
use super::rational::Rational;
use super::Var;

/// How a variable occurs in an inequality `sum(w_k x_k) + b >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Occurrence {
    Positive,
    Negative,
    Absent,
}

/// A non-strict linear inequality `expr >= 0` in canonical form.
///
/// Canonical form divides by the absolute value of the leading coefficient
/// (smallest variable index), or by `|b|` for a constant inequality, so
/// positive rescalings of the same half-space compare equal. Constant
/// inequalities therefore reduce to `1 >= 0`, `0 >= 0` or `-1 >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inequality {
    expr: LinearExpr,
}

impl Inequality {
    pub fn new(expr: LinearExpr) -> Self {
        match expr.abs_leading_or_bias() {
            Some(scale) if !scale.is_one() => Inequality { expr: expr.scale(&scale.recip()) },
            _ => Inequality { expr },
        }
    }

    /// `lhs >= rhs`
    pub fn ge(lhs: &LinearExpr, rhs: &LinearExpr) -> Self {
        Self::new(lhs - rhs)
    }

    /// The canonical `-1 >= 0`.
    pub fn falsum() -> Self {
        Inequality { expr: LinearExpr::constant(-Rational::one()) }
    }

    pub fn expr(&self) -> &LinearExpr {
        &self.expr
    }

    pub fn into_expr(self) -> LinearExpr {
        self.expr
    }

    pub fn occurrence(&self, v: Var) -> Occurrence {
        match self.expr.coeff_ref(v) {
            Some(c) if c.is_positive() => Occurrence::Positive,
            Some(_) => Occurrence::Negative,
            None => Occurrence::Absent,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.expr.is_constant()
    }

    /// Truth value of a variable-free inequality, exact.
    pub fn constant_truth(&self) -> Option<bool> {
        self.is_constant().then(|| !self.expr.bias().is_negative())
    }

    pub fn is_constant_false(&self) -> bool {
        self.constant_truth() == Some(false)
    }

    pub fn is_constant_true(&self) -> bool {
        self.constant_truth() == Some(true)
    }

    /// Whether `self` entails `other` syntactically: a false constant entails
    /// anything, and parallel canonical half-spaces compare by bias.
    pub fn implies(&self, other: &Inequality) -> bool {
        if self.is_constant_false() || other.is_constant_true() {
            return true;
        }
        self.expr.coeffs() == other.expr.coeffs() && self.expr.bias() <= other.expr.bias()
    }

    /// Holds at `sample` up to `tol` in canonical units.
    pub fn holds_at(&self, sample: &[f64], tol: f64) -> Result<bool, super::AlgebraError> {
        Ok(self.expr.evaluate(sample)? >= -tol)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} >= 0", self.expr)
    }
}
