use rayon::prelude::*;

use super::resolve::cp_resolve;
use super::CompileError;
use crate::algebra::{prune_subsumed, Constraint, SubsumptionIndex, Var};

/// Resolvent pairs per step above which resolution runs on the rayon pool.
const PARALLEL_PAIRS: usize = 512;

/// Four-way split of a level by how it mentions the pivot variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariablePartition {
    pub plus: Vec<Constraint>,
    pub minus: Vec<Constraint>,
    pub mixed: Vec<Constraint>,
    pub free: Vec<Constraint>,
}

pub fn partition(level: &[Constraint], var: Var) -> VariablePartition {
    let mut p = VariablePartition::default();
    for c in level {
        match c.occurrences(var) {
            (true, false) => p.plus.push(c.clone()),
            (false, true) => p.minus.push(c.clone()),
            (true, true) => p.mixed.push(c.clone()),
            (false, false) => p.free.push(c.clone()),
        }
    }
    p
}

/// Counts generated resolvents against a per-compile cap.
#[derive(Clone, Debug)]
pub struct Budget {
    pub limit: usize,
    pub used: usize,
}

impl Budget {
    pub fn new(limit: usize) -> Self {
        Budget { limit, used: 0 }
    }

    fn spend(&mut self, n: usize, var: Var) -> Result<(), CompileError> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            return Err(CompileError::ResolventBudget { limit: self.limit, var });
        }
        Ok(())
    }
}

/// Resolves every `lefts x rights` pair; order of the output follows the
/// input order, tautologies dropped.
fn resolve_all(lefts: &[Constraint], rights: &[Constraint], var: Var) -> Result<Vec<Constraint>, CompileError> {
    let row = |l: &Constraint| -> Result<Vec<Constraint>, CompileError> {
        let mut out = Vec::new();
        for r in rights {
            if let Some(c) = cp_resolve(l, r, var)? {
                out.push(c);
            }
        }
        Ok(out)
    };
    let rows: Vec<Vec<Constraint>> = if lefts.len() * rights.len() >= PARALLEL_PAIRS {
        lefts.par_iter().map(row).collect::<Result<_, _>>()?
    } else {
        lefts.iter().map(row).collect::<Result<_, _>>()?
    };
    Ok(rows.into_iter().flatten().collect())
}

/// The positive closure: `plus` together with up to `|mixed|` rounds of
/// resolution against `mixed`. Each round only resolves the clauses that
/// were new in the previous one; clauses entailed by the accumulated set
/// are discarded.
pub fn close_plusplus(
    plus: &[Constraint],
    mixed: &[Constraint],
    var: Var,
    budget: &mut Budget,
) -> Result<Vec<Constraint>, CompileError> {
    let mut acc = SubsumptionIndex::new();
    let mut frontier = prune_subsumed(plus.to_vec());
    for c in &frontier {
        acc.insert(c.clone());
    }
    for _ in 0..mixed.len() {
        if frontier.is_empty() {
            break;
        }
        budget.spend(frontier.len() * mixed.len(), var)?;
        let produced = prune_subsumed(resolve_all(&frontier, mixed, var)?);
        let fresh: Vec<Constraint> = produced.into_iter().filter(|c| !acc.is_subsumed(c)).collect();
        if fresh.is_empty() {
            break;
        }
        for f in &fresh {
            acc.remove_subsumed_by(f);
        }
        for f in &fresh {
            acc.insert(f.clone());
        }
        frontier = fresh;
    }
    Ok(acc.into_sorted_vec())
}

/// One elimination step: `level` is the set over the first `i` ordering
/// variables, `var` the last of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    pub variable: Var,
    pub partition: VariablePartition,
    pub plusplus: Vec<Constraint>,
    /// The next level, free of `variable`.
    pub result: Vec<Constraint>,
    pub resolvent_count: usize,
}

pub fn eliminate(level: &[Constraint], var: Var, budget: &mut Budget) -> Result<EliminationStep, CompileError> {
    let start = budget.used;
    let partition = partition(level, var);
    let plusplus = close_plusplus(&partition.plus, &partition.mixed, var, budget)?;
    budget.spend(plusplus.len() * partition.minus.len(), var)?;
    let mut result = partition.free.clone();
    result.extend(resolve_all(&plusplus, &partition.minus, var)?);
    let result = prune_subsumed(result);
    if let Some(leak) = result.iter().find(|c| c.mentions(var)) {
        return Err(CompileError::Internal(format!("x{} survives elimination in `{leak}`", var + 1)));
    }
    Ok(EliminationStep { variable: var, partition, plusplus, result, resolvent_count: budget.used - start })
}
