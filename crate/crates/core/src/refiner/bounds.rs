use crate::algebra::{PartialConstraint, UnivariateIneq};

/// Left and right boundary of one substituted constraint: it holds left of
/// `left` or right of `right`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPair {
    /// `-inf` when no disjunct bounds the variable from above.
    pub left: f64,
    pub right: f64,
    /// Disjunct indices that produced the finite bounds.
    pub left_source: Option<usize>,
    pub right_source: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundaries {
    TriviallySatisfied,
    Pair(BoundaryPair),
}

/// Boundaries of a constraint after all but one variable was substituted.
pub fn boundaries(pc: &PartialConstraint) -> Boundaries {
    match pc {
        PartialConstraint::Satisfied => Boundaries::TriviallySatisfied,
        PartialConstraint::Univariate(us) => Boundaries::Pair(pair_of(us)),
    }
}

pub fn pair_of(us: &[UnivariateIneq]) -> BoundaryPair {
    let mut p = BoundaryPair { left: f64::NEG_INFINITY, right: f64::INFINITY, left_source: None, right_source: None };
    for u in us {
        let b = u.boundary();
        if u.is_lower() {
            if b < p.right {
                p.right = b;
                p.right_source = Some(u.disjunct);
            }
        } else if b > p.left {
            p.left = b;
            p.left_source = Some(u.disjunct);
        }
    }
    p
}

/// A candidate value and the constraint/disjunct it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub constraint: usize,
    pub disjunct: usize,
}

/// Holds iff some disjunct holds at `x` within `tol`.
#[inline]
pub fn holds(us: &[UnivariateIneq], x: f64, tol: f64) -> bool {
    us.iter().any(|u| u.holds_at(x, tol))
}

#[inline]
pub fn holds_all(cs: &[&[UnivariateIneq]], x: f64, tol: f64) -> bool {
    cs.iter().all(|us| holds(us, x, tol))
}

/// The closest satisfying left and right boundaries to `v` among the
/// per-constraint boundaries of `cs`.
pub fn closest_bounds(cs: &[&[UnivariateIneq]], v: f64, tol: f64) -> (Option<Bound>, Option<Bound>) {
    let mut left: Option<Bound> = None;
    let mut right: Option<Bound> = None;
    for (ci, us) in cs.iter().enumerate() {
        let p = pair_of(us);
        if let Some(d) = p.left_source {
            if p.left < v && left.is_none_or(|b| p.left > b.value) && holds_all(cs, p.left, tol) {
                left = Some(Bound { value: p.left, constraint: ci, disjunct: d });
            }
        }
        if let Some(d) = p.right_source {
            if p.right > v && right.is_none_or(|b| p.right < b.value) && holds_all(cs, p.right, tol) {
                right = Some(Bound { value: p.right, constraint: ci, disjunct: d });
            }
        }
    }
    (left, right)
}
