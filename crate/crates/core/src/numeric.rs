//! Double-double accumulation for evaluating exact-rational linear forms at
//! floating-point points.
//!
//! A [`Dd`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`,
//! giving roughly 106 bits of significand. Coefficients are rounded from
//! their exact rational values into this form once, and every product with a
//! sample value is accumulated without intermediate rounding to `f64`.

use num_rational::BigRational;
use std::ops::{Add, Div, Mul, Neg};

use num_traits::{ToPrimitive, Zero};

use crate::algebra::Var;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to an exact rational.
    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_zero() {
            return Dd::ZERO;
        }
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rest = match BigRational::from_float(hi) {
            Some(h) => (r - h).to_f64().unwrap_or(0.0),
            None => 0.0,
        };
        let (hi, lo) = quick_two_sum(hi, rest);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    /// `self * b` for a plain double `b`.
    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;

    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

/// Long division with one correction step; accurate to a few ulps of
/// double-double precision, far below what the final `f64` rounding sees.
impl Div for Dd {
    type Output = Dd;

    fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self + -other.mul_f64(q1);
        let q2 = r.hi / other.hi;
        let r = r + -other.mul_f64(q2);
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

/// A linear form `sum(coeff * x[var]) + bias` with double-double weights.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DdForm {
    pub terms: Vec<(Var, Dd)>,
    pub bias: Dd,
}

impl DdForm {
    /// Evaluates at `values`; every referenced index must be in range.
    #[inline]
    pub fn eval(&self, values: &[f64]) -> Dd {
        let mut acc = self.bias;
        for &(var, coeff) in &self.terms {
            acc = acc + coeff.mul_f64(values[var]);
        }
        acc
    }

    pub fn max_var(&self) -> Option<Var> {
        self.terms.iter().map(|&(v, _)| v).max()
    }
}
