use serde::Serialize;

use crate::algebra::{AlgebraError, ConstraintSet};

/// Violation statistics of a dataset against a constraint set. Percentages
/// are in `[0, 100]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Rows violating at least one constraint.
    pub cvr: f64,
    /// Mean per-row share of violated constraints.
    pub scvc: f64,
    /// Constraints violated by at least one row.
    pub cvc: f64,
    pub per_constraint_violation_counts: Vec<usize>,
    pub n_rows: usize,
    pub n_constraints: usize,
}

impl MetricsReport {
    pub fn violating_rows(&self) -> usize {
        (self.cvr * self.n_rows as f64 / 100.0).round() as usize
    }

    pub fn summary(&self) -> String {
        format!(
            "rows {:>8}  constraints {:>6}\nCVR  {:>8.4} %\nsCVC {:>8.4} %\nCVC  {:>8.4} %\n",
            self.n_rows, self.n_constraints, self.cvr, self.scvc, self.cvc
        )
    }
}

pub fn metrics<R: AsRef<[f64]>>(set: &ConstraintSet, rows: &[R], tol: f64) -> Result<MetricsReport, AlgebraError> {
    let checker = set.checker();
    let m = set.len();
    let n = rows.len();
    let mut counts = vec![0usize; m];
    let mut bad_rows = 0usize;
    let mut violated_total = 0usize;
    for row in rows {
        let s = checker.check(row.as_ref(), tol)?;
        let mut violated = 0usize;
        for (j, ok) in s.per_constraint.iter().enumerate() {
            if !ok {
                counts[j] += 1;
                violated += 1;
            }
        }
        if violated > 0 {
            bad_rows += 1;
            violated_total += violated;
        }
    }
    let (cvr, scvc, cvc) = if m == 0 || n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        (
            100.0 * bad_rows as f64 / n as f64,
            100.0 * violated_total as f64 / (m as f64 * n as f64),
            100.0 * counts.iter().filter(|&&c| c > 0).count() as f64 / m as f64,
        )
    };
    Ok(MetricsReport { cvr, scvc, cvc, per_constraint_violation_counts: counts, n_rows: n, n_constraints: m })
}
