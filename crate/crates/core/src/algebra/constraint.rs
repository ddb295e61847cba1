use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;

use super::inequality::{Inequality, Occurrence};
use super::rational::Rational;
use super::{AlgebraError, Var};
use crate::numeric::Dd;

/// A disjunction of canonical inequalities.
///
/// Construction goes through [`Constraint::build`], which keeps the clause in
/// a normal form: constant-false disjuncts are dropped, parallel disjuncts
/// collapse to the weakest one, and the disjuncts are sorted. A clause left
/// with no disjuncts is represented by the single disjunct `-1 >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    disjuncts: Vec<Inequality>,
}

impl Constraint {
    /// Normalizes a disjunction. Returns `None` when the disjunction is a
    /// tautology: it holds a constant-true disjunct, or two opposite
    /// half-spaces that together cover the line.
    pub fn build(disjuncts: impl IntoIterator<Item = Inequality>) -> Option<Constraint> {
        let mut out: Vec<Inequality> = Vec::new();
        for d in disjuncts {
            match d.constant_truth() {
                Some(true) => return None,
                Some(false) => {}
                None => out.push(d),
            }
        }
        // sorted by coefficients then bias: keep the last, weakest, of each run
        out.sort_unstable();
        out.dedup_by(|later, kept| {
            let same = later.expr().coeffs() == kept.expr().coeffs();
            if same {
                std::mem::swap(later, kept);
            }
            same
        });
        for d in &out {
            if !d.expr().leading_coeff().is_some_and(|c| c.is_negative()) {
                continue;
            }
            let opposite: BTreeMap<Var, Rational> = d.expr().coeffs().iter().map(|(&v, c)| (v, -c)).collect();
            if let Ok(i) = out.binary_search_by(|x| x.expr().coeffs().cmp(&opposite)) {
                // e + b >= 0 or -e + b' >= 0 covers everything iff b + b' >= 0
                if !(d.expr().bias() + out[i].expr().bias()).is_negative() {
                    return None;
                }
            }
        }
        if out.is_empty() {
            out.push(Inequality::falsum());
        }
        Some(Constraint { disjuncts: out })
    }

    /// A clause with a single inequality (`None` if it is constant-true).
    pub fn single(ineq: Inequality) -> Option<Constraint> {
        Self::build([ineq])
    }

    pub fn falsum() -> Constraint {
        Constraint { disjuncts: vec![Inequality::falsum()] }
    }

    pub fn disjuncts(&self) -> &[Inequality] {
        &self.disjuncts
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Every disjunct is a negative constant: the refutation shape.
    pub fn is_unsat_witness(&self) -> bool {
        self.disjuncts.iter().all(Inequality::is_constant_false)
    }

    pub fn is_variable_free(&self) -> bool {
        self.disjuncts.iter().all(Inequality::is_constant)
    }

    /// `(has positive occurrence, has negative occurrence)` of `v`.
    pub fn occurrences(&self, v: Var) -> (bool, bool) {
        let mut pos = false;
        let mut neg = false;
        for d in &self.disjuncts {
            match d.occurrence(v) {
                Occurrence::Positive => pos = true,
                Occurrence::Negative => neg = true,
                Occurrence::Absent => {}
            }
        }
        (pos, neg)
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.disjuncts.iter().any(|d| d.expr().coeff_ref(v).is_some())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.disjuncts.iter().filter_map(|d| d.expr().max_var()).max()
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.disjuncts.iter().flat_map(|d| d.expr().variables())
    }

    /// Whether `self` entails `other` clause-wise: each disjunct of `self`
    /// implies some disjunct of `other`. Then `other` is redundant next to
    /// `self`.
    pub fn subsumes(&self, other: &Constraint) -> bool {
        self.disjuncts.iter().all(|d| other.disjuncts.iter().any(|o| d.implies(o)))
    }

    pub fn satisfied_by(&self, sample: &[f64], tol: f64) -> Result<bool, AlgebraError> {
        for d in &self.disjuncts {
            if d.holds_at(sample, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact satisfaction at a rational point.
    pub fn satisfied_exact(&self, point: &[Rational]) -> Result<bool, AlgebraError> {
        for d in &self.disjuncts {
            if d.expr().evaluate_exact(point)? >= Rational::from_integer(0.into()) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Fixes every variable but `free` from `bindings` and classifies the
    /// disjuncts. A disjunct without `free` becomes a constant verdict under
    /// `tol`; a true one short-circuits the whole constraint.
    pub fn substitute(&self, bindings: &[Option<f64>], free: Var, tol: f64) -> Result<PartialConstraint, AlgebraError> {
        if let Some(Some(_)) = bindings.get(free) {
            return Err(AlgebraError::FreeVariableBound(free));
        }
        let mut out = Vec::new();
        for (idx, d) in self.disjuncts.iter().enumerate() {
            let mut offset = Dd::from_rational(d.expr().bias());
            let mut pivot = Dd::ZERO;
            for (v, c) in d.expr().terms() {
                if v == free {
                    pivot = Dd::from_rational(c);
                    continue;
                }
                let x = bindings.get(v).copied().flatten().ok_or(AlgebraError::UnboundVariable(v))?;
                offset = offset + Dd::from_rational(c).mul_f64(x);
            }
            if pivot.is_zero() {
                if offset.to_f64() >= -tol {
                    return Ok(PartialConstraint::Satisfied);
                }
            } else {
                out.push(UnivariateIneq { coeff: pivot, offset, disjunct: idx });
            }
        }
        Ok(PartialConstraint::Univariate(out))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " or ")?;
            }
            if self.disjuncts.len() > 1 {
                write!(f, "({d})")?;
            } else {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

/// A constraint after all but one variable has been fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum PartialConstraint {
    /// Some disjunct already holds (within tolerance).
    Satisfied,
    /// Disjuncts still depending on the free variable. Empty means the
    /// constraint is violated whatever the free variable is.
    Univariate(Vec<UnivariateIneq>),
}

/// `coeff * x + offset >= 0` in the single free variable `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnivariateIneq {
    pub coeff: Dd,
    pub offset: Dd,
    /// Index of the originating disjunct in its constraint.
    pub disjunct: usize,
}

impl UnivariateIneq {
    #[inline]
    pub fn holds_at(&self, x: f64, tol: f64) -> bool {
        (self.offset + self.coeff.mul_f64(x)).to_f64() >= -tol
    }

    /// The root `-offset / coeff`.
    #[inline]
    pub fn boundary(&self) -> f64 {
        (-self.offset / self.coeff).to_f64()
    }

    /// `true` for a lower bound (`x >= boundary`), `false` for an upper bound.
    #[inline]
    pub fn is_lower(&self) -> bool {
        self.coeff.hi > 0.0
    }
}
