use std::fmt;

use num_traits::Zero;

use super::bounds::{closest_bounds, holds_all};
use super::RefineError;
use crate::algebra::rational::to_f64;
use crate::algebra::{Constraint, UnivariateIneq, Var};
use crate::compiler::{CompiledLayer, Verdict};
use crate::numeric::{Dd, DdForm};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineConfig {
    /// Satisfaction tolerance, in canonical expression units.
    pub tau: f64,
    /// Re-check the constraints of each level that do not mention its
    /// variable. On by default in debug builds.
    pub verify_inactive: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig { tau: 1e-9, verify_inactive: cfg!(debug_assertions) }
    }
}

/// What happened to one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Satisfied the substituted constraints and was left untouched.
    Kept,
    /// No substituted constraint restricts it.
    Free,
    /// Moved down to a left boundary. `constraint` indexes the chain level
    /// of the variable, `disjunct` the clause.
    SnappedLeft {
        constraint: usize,
        disjunct: usize,
    },
    SnappedRight {
        constraint: usize,
        disjunct: usize,
    },
}

impl Provenance {
    pub fn action(&self) -> &'static str {
        match self {
            Provenance::Kept => "kept",
            Provenance::Free => "free",
            Provenance::SnappedLeft { .. } => "snapped_left",
            Provenance::SnappedRight { .. } => "snapped_right",
        }
    }

    pub fn source(&self) -> Option<(usize, usize)> {
        match *self {
            Provenance::SnappedLeft { constraint, disjunct } | Provenance::SnappedRight { constraint, disjunct } => {
                Some((constraint, disjunct))
            }
            _ => None,
        }
    }

    pub fn is_snapped(&self) -> bool {
        self.source().is_some()
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.action())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineResult {
    /// Data-column order.
    pub refined: Vec<f64>,
    pub provenance: Vec<Provenance>,
    /// Row-major `D x D`: entry `(i, j)` is d refined_i / d input_j.
    pub jacobian: Option<Vec<f64>>,
}

impl RefineResult {
    pub fn jacobian_row(&self, i: usize) -> Option<&[f64]> {
        let d = self.refined.len();
        self.jacobian.as_ref().map(|j| &j[i * d..(i + 1) * d])
    }
}

#[derive(Clone, Debug)]
struct PlannedDisjunct {
    pivot: Dd,
    others: Vec<(Var, Dd)>,
    bias: Dd,
    /// `-a_k / w` per other variable, rounded once from the exact ratio.
    grad: Vec<(Var, f64)>,
}

#[derive(Clone, Debug)]
struct PlannedConstraint {
    /// Index in the chain level.
    index: usize,
    disjuncts: Vec<PlannedDisjunct>,
}

#[derive(Clone, Debug)]
struct PlanStep {
    var: Var,
    active: Vec<PlannedConstraint>,
    inactive: Vec<(usize, Vec<DdForm>)>,
}

/// A compiled layer prepared for repeated refinement. Shareable across
/// threads.
#[derive(Clone, Debug)]
pub struct Refiner {
    dimension: usize,
    steps: Vec<PlanStep>,
}

fn plan_constraint(index: usize, c: &Constraint, var: Var) -> PlannedConstraint {
    let disjuncts = c
        .disjuncts()
        .iter()
        .map(|d| {
            let e = d.expr();
            let w = e.coeff(var);
            let grad = if w.is_zero() {
                Vec::new()
            } else {
                e.terms().filter(|&(k, _)| k != var).map(|(k, a)| (k, to_f64(&(-a / &w)))).collect()
            };
            PlannedDisjunct {
                pivot: Dd::from_rational(&w),
                others: e.terms().filter(|&(k, _)| k != var).map(|(k, a)| (k, Dd::from_rational(a))).collect(),
                bias: Dd::from_rational(e.bias()),
                grad,
            }
        })
        .collect();
    PlannedConstraint { index, disjuncts }
}

impl Refiner {
    pub fn new(layer: &CompiledLayer) -> Result<Self, RefineError> {
        if let Verdict::Unsat(w) = layer.verdict() {
            return Err(RefineError::Unsat(w.to_string()));
        }
        let steps = (0..layer.dimension())
            .map(|i| {
                let var = layer.ordering()[i];
                let mut active = Vec::new();
                let mut inactive = Vec::new();
                for (idx, c) in layer.level(i).iter().enumerate() {
                    if c.mentions(var) {
                        active.push(plan_constraint(idx, c, var));
                    } else {
                        inactive.push((idx, c.disjuncts().iter().map(|d| d.expr().to_dd()).collect()));
                    }
                }
                PlanStep { var, active, inactive }
            })
            .collect();
        Ok(Refiner { dimension: layer.dimension(), steps })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn refine(&self, sample: &[f64], cfg: &RefineConfig) -> Result<RefineResult, RefineError> {
        self.run(sample, cfg, false)
    }

    pub fn refine_with_jacobian(&self, sample: &[f64], cfg: &RefineConfig) -> Result<RefineResult, RefineError> {
        self.run(sample, cfg, true)
    }

    fn run(&self, sample: &[f64], cfg: &RefineConfig, jacobian: bool) -> Result<RefineResult, RefineError> {
        let d = self.dimension;
        if sample.len() != d {
            return Err(RefineError::DimensionMismatch { expected: d, got: sample.len() });
        }
        if let Some(var) = sample.iter().position(|x| !x.is_finite()) {
            return Err(RefineError::NonFinite { var });
        }
        let tau = cfg.tau;
        let mut values = sample.to_vec();
        let mut provenance = vec![Provenance::Free; d];
        let mut jac = jacobian.then(|| vec![0.0; d * d]);
        let mut flat: Vec<UnivariateIneq> = Vec::new();
        let mut groups: Vec<(usize, usize, usize)> = Vec::new();
        let mut visits = 0usize;

        for (i, step) in self.steps.iter().enumerate() {
            visits += 1;
            let x = step.var;
            if cfg.verify_inactive {
                if let Some(&(idx, _)) =
                    step.inactive.iter().find(|(_, ds)| !ds.iter().any(|f| f.eval(&values).to_f64() >= -tau))
                {
                    return Err(RefineError::NumericFailure { position: i, var: x, constraints: vec![idx] });
                }
            }

            flat.clear();
            groups.clear();
            'constraints: for (gi, pc) in step.active.iter().enumerate() {
                let start = flat.len();
                for (di, pd) in pc.disjuncts.iter().enumerate() {
                    let mut offset = pd.bias;
                    for &(k, a) in &pd.others {
                        offset = offset + a.mul_f64(values[k]);
                    }
                    if pd.pivot.is_zero() {
                        if offset.to_f64() >= -tau {
                            flat.truncate(start);
                            continue 'constraints;
                        }
                    } else {
                        flat.push(UnivariateIneq { coeff: pd.pivot, offset, disjunct: di });
                    }
                }
                if flat.len() == start {
                    return Err(RefineError::NumericFailure { position: i, var: x, constraints: vec![pc.index] });
                }
                groups.push((gi, start, flat.len()));
            }

            let v = values[x];
            let refs: Vec<&[UnivariateIneq]> = groups.iter().map(|&(_, s, e)| &flat[s..e]).collect();
            let chosen = if refs.is_empty() {
                None
            } else if holds_all(&refs, v, tau) {
                provenance[x] = Provenance::Kept;
                None
            } else {
                let (l, r) = closest_bounds(&refs, v, tau);
                let pick = match (l, r) {
                    (Some(l), Some(r)) if (v - l.value).abs() < (r.value - v).abs() => (l, true),
                    (_, Some(r)) => (r, false),
                    (Some(l), None) => (l, true),
                    (None, None) => {
                        return Err(RefineError::NumericFailure {
                            position: i,
                            var: x,
                            constraints: groups.iter().map(|&(g, _, _)| step.active[g].index).collect(),
                        })
                    }
                };
                Some(pick)
            };

            match chosen {
                None => {
                    if let Some(j) = jac.as_mut() {
                        j[x * d + x] = 1.0;
                    }
                }
                Some((b, left)) => {
                    let pc = &step.active[groups[b.constraint].0];
                    values[x] = b.value;
                    provenance[x] = if left {
                        Provenance::SnappedLeft { constraint: pc.index, disjunct: b.disjunct }
                    } else {
                        Provenance::SnappedRight { constraint: pc.index, disjunct: b.disjunct }
                    };
                    if let Some(j) = jac.as_mut() {
                        for &(k, g) in &pc.disjuncts[b.disjunct].grad {
                            for col in 0..d {
                                j[x * d + col] += g * j[k * d + col];
                            }
                        }
                    }
                }
            }
        }
        debug_assert_eq!(visits, d, "each variable is refined exactly once");
        Ok(RefineResult { refined: values, provenance, jacobian: jac })
    }
}

/// One-shot refinement of `sample` (data-column order) through `layer`.
pub fn refine(layer: &CompiledLayer, sample: &[f64], cfg: &RefineConfig) -> Result<RefineResult, RefineError> {
    Refiner::new(layer)?.refine(sample, cfg)
}

pub fn refine_with_jacobian(
    layer: &CompiledLayer,
    sample: &[f64],
    cfg: &RefineConfig,
) -> Result<RefineResult, RefineError> {
    Refiner::new(layer)?.refine_with_jacobian(sample, cfg)
}
