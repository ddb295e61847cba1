use super::eliminate::{eliminate, Budget};
use super::CompileError;
use crate::algebra::{prune_subsumed, Constraint, ConstraintSet, Rational, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    /// A variable-free clause whose disjuncts are all negative constants.
    Unsat(Constraint),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat)
    }
}

/// Sizes recorded while eliminating one variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub var: Var,
    pub plus: usize,
    pub minus: usize,
    pub mixed: usize,
    pub free: usize,
    pub plusplus: usize,
    pub resolvents: usize,
    /// Size of the level left after elimination.
    pub result: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileConfig {
    pub max_resolvents: usize,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig { max_resolvents: 500_000 }
    }
}

/// The elimination chain of a constraint set under a variable ordering.
///
/// `levels[i]` holds the constraints over the first `i + 1` ordering
/// variables; the last level is the (pruned) input set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledLayer {
    dimension: usize,
    ordering: Vec<Var>,
    levels: Vec<Vec<Constraint>>,
    stats: Vec<StepStats>,
    verdict: Verdict,
    epsilon: Rational,
}

/// Checks that `ordering` is a permutation of `0..dimension`.
pub fn validate_ordering(ordering: &[Var], dimension: usize) -> Result<(), CompileError> {
    if ordering.len() != dimension {
        return Err(CompileError::InvalidOrdering(format!(
            "ordering has {} variables, expected {dimension}",
            ordering.len()
        )));
    }
    let mut seen = vec![false; dimension];
    for &v in ordering {
        if v >= dimension || std::mem::replace(&mut seen[v], true) {
            return Err(CompileError::InvalidOrdering(format!("x{} repeated or out of range", v + 1)));
        }
    }
    Ok(())
}

/// Runs the elimination from the last ordering variable down to the first.
pub fn compile(
    set: &ConstraintSet,
    ordering: &[Var],
    epsilon: Rational,
    cfg: &CompileConfig,
) -> Result<CompiledLayer, CompileError> {
    let d = set.dimension();
    validate_ordering(ordering, d)?;
    let mut budget = Budget::new(cfg.max_resolvents);
    let mut levels = vec![Vec::new(); d];
    let mut stats = Vec::with_capacity(d);
    let mut current = prune_subsumed(set.constraints().to_vec());
    for i in (0..d).rev() {
        let var = ordering[i];
        let step = eliminate(&current, var, &mut budget)?;
        log::debug!(
            "x{}: +{} -{} ±{} free {} ++{} resolvents {} -> {}",
            var + 1,
            step.partition.plus.len(),
            step.partition.minus.len(),
            step.partition.mixed.len(),
            step.partition.free.len(),
            step.plusplus.len(),
            step.resolvent_count,
            step.result.len()
        );
        stats.push(StepStats {
            var,
            plus: step.partition.plus.len(),
            minus: step.partition.minus.len(),
            mixed: step.partition.mixed.len(),
            free: step.partition.free.len(),
            plusplus: step.plusplus.len(),
            resolvents: step.resolvent_count,
            result: step.result.len(),
        });
        levels[i] = std::mem::replace(&mut current, step.result);
    }
    stats.reverse();
    let verdict = verdict_of(&current)?;
    let layer = CompiledLayer { dimension: d, ordering: ordering.to_vec(), levels, stats, verdict, epsilon };
    layer.check_prefixes()?;
    Ok(layer)
}

/// Reads the verdict off the variable-free final level, exactly.
fn verdict_of(last: &[Constraint]) -> Result<Verdict, CompileError> {
    if let Some(c) = last.iter().find(|c| !c.is_variable_free()) {
        return Err(CompileError::Internal(format!("variable left after the last elimination: `{c}`")));
    }
    Ok(match last.iter().find(|c| c.is_unsat_witness()) {
        Some(w) => Verdict::Unsat(w.clone()),
        None => Verdict::Sat,
    })
}

impl CompiledLayer {
    /// Rebuilds a layer from stored levels (no step statistics).
    pub fn from_parts(
        dimension: usize,
        ordering: Vec<Var>,
        levels: Vec<Vec<Constraint>>,
        verdict: Verdict,
        epsilon: Rational,
    ) -> Result<Self, CompileError> {
        validate_ordering(&ordering, dimension)?;
        if levels.len() != dimension {
            return Err(CompileError::InvalidArtifact(format!(
                "{} chain levels for {dimension} variables",
                levels.len()
            )));
        }
        let layer = CompiledLayer { dimension, ordering, levels, stats: Vec::new(), verdict, epsilon };
        layer.check_prefixes()?;
        Ok(layer)
    }

    /// Every level only mentions its ordering prefix.
    fn check_prefixes(&self) -> Result<(), CompileError> {
        let mut position = vec![0; self.dimension];
        for (i, &v) in self.ordering.iter().enumerate() {
            position[v] = i;
        }
        for (i, level) in self.levels.iter().enumerate() {
            for c in level {
                if let Some(v) = c.variables().find(|&v| v >= self.dimension || position[v] > i) {
                    return Err(CompileError::InvalidArtifact(format!(
                        "level {} mentions x{} outside its ordering prefix",
                        i + 1,
                        v + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn ordering(&self) -> &[Var] {
        &self.ordering
    }

    /// Constraints over the first `i + 1` ordering variables.
    pub fn level(&self, i: usize) -> &[Constraint] {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[Vec<Constraint>] {
        &self.levels
    }

    /// Constraints of `level(i)` that mention the `i`-th ordering variable.
    pub fn active(&self, i: usize) -> impl Iterator<Item = (usize, &Constraint)> + '_ {
        let v = self.ordering[i];
        self.levels[i].iter().enumerate().filter(move |(_, c)| c.mentions(v))
    }

    pub fn stats(&self) -> &[StepStats] {
        &self.stats
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn is_sat(&self) -> bool {
        self.verdict.is_sat()
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn total_resolvents(&self) -> usize {
        self.stats.iter().map(|s| s.resolvents).sum()
    }
}
