use std::fmt;

use crate::algebra::{AlgebraError, LinearExpr};

use super::Position;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Ne,
}

impl Comparison {
    pub fn negate(self) -> Self {
        match self {
            Comparison::Ge => Comparison::Lt,
            Comparison::Lt => Comparison::Ge,
            Comparison::Le => Comparison::Gt,
            Comparison::Gt => Comparison::Le,
            Comparison::Eq => Comparison::Ne,
            Comparison::Ne => Comparison::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Ge => ">=",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Lt => "<",
            Comparison::Eq => "==",
            Comparison::Ne => "!=",
        }
    }

    /// Strict real-valued semantics.
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparison::Ge => lhs >= rhs,
            Comparison::Le => lhs <= rhs,
            Comparison::Gt => lhs > rhs,
            Comparison::Lt => lhs < rhs,
            Comparison::Eq => lhs == rhs,
            Comparison::Ne => lhs != rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub lhs: LinearExpr,
    pub cmp: Comparison,
    pub rhs: LinearExpr,
    pub pos: Position,
}

impl Atom {
    /// `lhs - rhs` at `sample`.
    pub fn margin(&self, sample: &[f64]) -> Result<f64, AlgebraError> {
        (&self.lhs - &self.rhs).evaluate(sample)
    }
}

/// A parsed boolean combination of linear atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Direct boolean evaluation with strict comparators evaluated strictly.
    pub fn eval(&self, sample: &[f64]) -> Result<bool, AlgebraError> {
        Ok(match self {
            Formula::Atom(a) => a.cmp.holds(a.margin(sample)?, 0.0),
            Formula::Not(f) => !f.eval(sample)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(sample)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(sample)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval(sample)? || b.eval(sample)?,
        })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{} {} {}", a.lhs, a.cmp.symbol(), a.rhs),
            Formula::Not(inner) => write!(f, "not ({inner})"),
            Formula::And(fs) | Formula::Or(fs) => {
                let op = if matches!(self, Formula::And(_)) { " and " } else { " or " };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "({g})")?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => write!(f, "({a}) -> ({b})"),
        }
    }
}

/// A formula together with the file line it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedFormula {
    pub line: usize,
    pub formula: Formula,
}
