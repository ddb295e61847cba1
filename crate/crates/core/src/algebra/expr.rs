use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rational::{self, Rational};
use super::{AlgebraError, Var};
use crate::numeric::{Dd, DdForm};

/// A linear expression `sum(w_k * x_k) + b` with exact rational weights.
///
/// Variables are zero-based indices into the sample vector. Zero weights are
/// never stored, so two expressions are equal iff they denote the same
/// affine function.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearExpr {
    coeffs: BTreeMap<Var, Rational>,
    bias: Rational,
}

impl LinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(bias: Rational) -> Self {
        LinearExpr { coeffs: BTreeMap::new(), bias }
    }

    pub fn var(v: Var) -> Self {
        Self::term(v, rational::int(1))
    }

    pub fn term(v: Var, coeff: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(v, coeff);
        }
        LinearExpr { coeffs, bias: Rational::zero() }
    }

    /// Builds from `(var, coeff)` pairs, summing repeats and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Var, Rational)>, bias: Rational) -> Self {
        let mut coeffs: BTreeMap<Var, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v).or_insert_with(Rational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        LinearExpr { coeffs, bias }
    }

    pub fn coeff(&self, v: Var) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, v: Var) -> Option<&Rational> {
        self.coeffs.get(&v)
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, Rational> {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (Var, &Rational)> + '_ {
        self.coeffs.iter().map(|(&v, c)| (v, c))
    }

    pub fn bias(&self) -> &Rational {
        &self.bias
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.keys().copied()
    }

    /// The coefficient of the smallest-index variable, if any.
    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinearExpr { coeffs: self.coeffs.iter().map(|(&v, c)| (v, c * k)).collect(), bias: &self.bias * k }
    }

    /// The expression with variable `v` removed (its `phi` in `w*x_v + phi`).
    pub fn without(&self, v: Var) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&v);
        out
    }

    /// Whether every weight and the bias are integers.
    pub fn is_integral(&self) -> bool {
        self.bias.is_integer() && self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn to_dd(&self) -> DdForm {
        DdForm {
            terms: self.coeffs.iter().map(|(&v, c)| (v, Dd::from_rational(c))).collect(),
            bias: Dd::from_rational(&self.bias),
        }
    }

    /// `sum(w_k * sample[k]) + b`, accumulated in double-double and rounded once.
    pub fn evaluate(&self, sample: &[f64]) -> Result<f64, AlgebraError> {
        if let Some(max) = self.max_var() {
            if max >= sample.len() {
                return Err(AlgebraError::DimensionMismatch { expected: max + 1, got: sample.len() });
            }
        }
        Ok(self.to_dd().eval(sample).to_f64())
    }

    /// Exact value at a rational point.
    pub fn evaluate_exact(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        let mut acc = self.bias.clone();
        for (&v, c) in &self.coeffs {
            let x = point.get(v).ok_or(AlgebraError::DimensionMismatch { expected: v + 1, got: point.len() })?;
            acc += c * x;
        }
        Ok(acc)
    }

    pub(crate) fn abs_leading_or_bias(&self) -> Option<Rational> {
        match self.leading_coeff() {
            Some(c) => Some(c.abs()),
            None if !self.bias.is_zero() => Some(self.bias.abs()),
            None => None,
        }
    }
}

impl Add for &LinearExpr {
    type Output = LinearExpr;

    fn add(self, rhs: &LinearExpr) -> LinearExpr {
        let mut coeffs = self.coeffs.clone();
        for (&v, c) in &rhs.coeffs {
            let entry = coeffs.entry(v).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&v);
            }
        }
        LinearExpr { coeffs, bias: &self.bias + &rhs.bias }
    }
}

impl Neg for &LinearExpr {
    type Output = LinearExpr;

    fn neg(self) -> LinearExpr {
        LinearExpr { coeffs: self.coeffs.iter().map(|(&v, c)| (v, -c)).collect(), bias: -&self.bias }
    }
}

impl Sub for &LinearExpr {
    type Output = LinearExpr;

    fn sub(self, rhs: &LinearExpr) -> LinearExpr {
        self + &(-rhs)
    }
}

impl Mul<&Rational> for &LinearExpr {
    type Output = LinearExpr;

    fn mul(self, k: &Rational) -> LinearExpr {
        self.scale(k)
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&v, c) in &self.coeffs {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if a == rational::int(1) {
                write!(f, "x{}", v + 1)?;
            } else {
                write!(f, "{a}*x{}", v + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.bias)
        } else if self.bias.is_negative() {
            write!(f, " - {}", self.bias.abs())
        } else if !self.bias.is_zero() {
            write!(f, " + {}", self.bias)
        } else {
            Ok(())
        }
    }
}
