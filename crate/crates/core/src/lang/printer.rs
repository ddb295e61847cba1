//! Renders constraint sets back into the constraint language.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::binding::VariableBinding;
use super::lexer::is_keyword;
use crate::algebra::rational::to_decimal_string;
use crate::algebra::{Constraint, ConstraintSet, Inequality, LinearExpr, Rational, Var};

/// One line per constraint, parseable with the same binding.
pub fn print_set(set: &ConstraintSet, binding: &VariableBinding) -> String {
    let mut out = String::new();
    for c in set.iter() {
        out.push_str(&print_constraint(c, binding));
        out.push('\n');
    }
    out
}

pub fn print_constraint(c: &Constraint, binding: &VariableBinding) -> String {
    let parts: Vec<String> = c.disjuncts().iter().map(|d| print_inequality(d, binding)).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        parts.iter().map(|p| format!("({p})")).collect::<Vec<_>>().join(" or ")
    }
}

pub fn print_inequality(d: &Inequality, binding: &VariableBinding) -> String {
    format!("{} >= 0", print_expr(&printable(d.expr()), binding))
}

/// Integer-scaled copy unless every value has a short exact decimal form.
fn printable(e: &LinearExpr) -> LinearExpr {
    let values = e.coeffs().values().chain(std::iter::once(e.bias()));
    if values.clone().all(|r| to_decimal_string(r).is_some()) {
        return e.clone();
    }
    let lcm = values.fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
    e.scale(&Rational::from_integer(lcm))
}

fn number(r: &Rational) -> String {
    to_decimal_string(r).unwrap_or_else(|| format!("{}/{}", r.numer(), r.denom()))
}

fn ident(v: Var, binding: &VariableBinding) -> String {
    let name = binding.name(v).map(str::to_string).unwrap_or_else(|| format!("x{}", v + 1));
    let plain = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_')
        && !is_keyword(&name);
    if plain {
        name
    } else {
        format!("\"{name}\"")
    }
}

/// Positive terms first, then negative ones, then the constant.
fn print_expr(e: &LinearExpr, binding: &VariableBinding) -> String {
    let mut terms: Vec<(Var, &Rational)> = e.terms().filter(|(_, c)| c.is_positive()).collect();
    terms.extend(e.terms().filter(|(_, c)| c.is_negative()));
    let mut out = String::new();
    for (v, c) in terms {
        let mag = c.abs();
        let body = if mag.is_one() { ident(v, binding) } else { format!("{}*{}", number(&mag), ident(v, binding)) };
        match (out.is_empty(), c.is_negative()) {
            (true, false) => out.push_str(&body),
            (true, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    let b = e.bias();
    if out.is_empty() {
        out = number(b);
    } else if !b.is_zero() {
        let sign = if b.is_negative() { '-' } else { '+' };
        out.push_str(&format!(" {sign} {}", number(&b.abs())));
    }
    out
}
