use super::CompileError;
use crate::algebra::{Constraint, Inequality, Occurrence, Var};

/// CP resolution of `psi` (positive pivots on `var`, no negative occurrence)
/// with `other` (negative pivots on `var`; the rest of `other` may only
/// mention `var` positively).
///
/// Every pair of a positive pivot `phi_k` (coefficient `w_k`) and a negative
/// pivot `phi'_j` (coefficient `w'_j`) contributes `phi_k/w_k - phi'_j/w'_j >= 0`,
/// which no longer mentions `var`; the non-pivot disjuncts of both premises
/// are carried over. Returns `Ok(None)` when the conclusion is a tautology.
pub fn cp_resolve(psi: &Constraint, other: &Constraint, var: Var) -> Result<Option<Constraint>, CompileError> {
    let mut pos = Vec::new();
    let mut rest = Vec::new();
    for d in psi.disjuncts() {
        match d.occurrence(var) {
            Occurrence::Positive => pos.push(d),
            Occurrence::Absent => rest.push(d.clone()),
            Occurrence::Negative => {
                return Err(CompileError::Internal(format!(
                    "left premise `{psi}` has a negative pivot on x{}",
                    var + 1
                )))
            }
        }
    }
    let mut neg = Vec::new();
    for d in other.disjuncts() {
        match d.occurrence(var) {
            Occurrence::Negative => neg.push(d),
            _ => rest.push(d.clone()),
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(CompileError::Internal(format!("no pivot pair on x{} between `{psi}` and `{other}`", var + 1)));
    }
    let mut out = rest;
    for p in &pos {
        let wp = p.expr().coeff(var);
        let lhs = p.expr().scale(&wp.recip());
        for n in &neg {
            let wn = n.expr().coeff(var);
            let rhs = n.expr().scale(&wn.recip());
            let resolvent = &lhs - &rhs;
            debug_assert!(resolvent.coeff_ref(var).is_none());
            out.push(Inequality::new(resolvent));
        }
    }
    Ok(Constraint::build(out))
}
