use rayon::prelude::*;
use serde::Serialize;

use super::refine::{Provenance, RefineConfig, RefineResult, Refiner};
use super::{RefineError, RowError};

/// One changed coordinate, for the provenance summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProvenanceRecord {
    pub row: usize,
    pub var: String,
    pub action: String,
    pub source_constraint_index: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowsOutput {
    /// In input order; a skipped row is returned unchanged.
    pub results: Vec<Option<RefineResult>>,
    /// Rows that failed (only populated with `skip_errors`).
    pub skipped: Vec<RowError>,
}

impl RowsOutput {
    /// Snapped coordinates as records, with variable names.
    pub fn provenance_records(&self, names: &[String]) -> Vec<ProvenanceRecord> {
        let mut out = Vec::new();
        for (row, r) in self.results.iter().enumerate() {
            let Some(r) = r else { continue };
            for (v, p) in r.provenance.iter().enumerate() {
                if p.is_snapped() {
                    out.push(ProvenanceRecord {
                        row,
                        var: names[v].clone(),
                        action: p.action().to_string(),
                        source_constraint_index: p.source().map(|(c, _)| c),
                    });
                }
            }
        }
        out
    }

    pub fn count(&self, pred: impl Fn(&Provenance) -> bool) -> usize {
        self.results.iter().flatten().flat_map(|r| r.provenance.iter()).filter(|p| pred(p)).count()
    }
}

fn run_rows<T: Sync, F>(rows: &[T], parallelism: usize, f: F) -> Vec<Result<RefineResult, RefineError>>
where
    F: Fn(&T) -> Result<RefineResult, RefineError> + Sync + Send,
{
    if parallelism <= 1 || rows.len() < 2 {
        return rows.iter().map(&f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(parallelism).build() {
        Ok(pool) => pool.install(|| rows.par_iter().map(&f).collect()),
        Err(_) => rows.iter().map(&f).collect(),
    }
}

/// Refines independent rows, optionally on `parallelism` worker threads.
/// Output order and values do not depend on `parallelism`.
pub fn refine_rows(
    refiner: &Refiner,
    rows: &[Vec<f64>],
    cfg: &RefineConfig,
    jacobian: bool,
    parallelism: usize,
    skip_errors: bool,
) -> Result<RowsOutput, RowError> {
    let results = run_rows(rows, parallelism, |row| {
        if jacobian {
            refiner.refine_with_jacobian(row, cfg)
        } else {
            refiner.refine(row, cfg)
        }
    });
    let mut out = RowsOutput::default();
    for (row, r) in results.into_iter().enumerate() {
        match r {
            Ok(r) => out.results.push(Some(r)),
            Err(error) if skip_errors && !matches!(error, RefineError::DimensionMismatch { .. }) => {
                out.results.push(None);
                out.skipped.push(RowError { row, error });
            }
            Err(error) => return Err(RowError { row, error }),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOutput {
    /// `N x D` row-major.
    pub values: Vec<f64>,
    /// `N x D x D` when requested.
    pub jacobians: Option<Vec<f64>>,
}

/// Refines an `N x D` row-major buffer. Results are bit-identical to
/// refining each row on its own.
pub fn refine_batch(
    refiner: &Refiner,
    buffer: &[f64],
    cfg: &RefineConfig,
    jacobian: bool,
    parallelism: usize,
) -> Result<BatchOutput, RowError> {
    let d = refiner.dimension();
    if d == 0 || !buffer.len().is_multiple_of(d) {
        return Err(RowError {
            row: buffer.len() / d.max(1),
            error: RefineError::DimensionMismatch { expected: d, got: buffer.len() % d.max(1) },
        });
    }
    let rows: Vec<&[f64]> = buffer.chunks_exact(d).collect();
    let results = run_rows(&rows, parallelism, |row| {
        if jacobian {
            refiner.refine_with_jacobian(row, cfg)
        } else {
            refiner.refine(row, cfg)
        }
    });
    let mut values = Vec::with_capacity(buffer.len());
    let mut jacobians = jacobian.then(|| Vec::with_capacity(buffer.len() * d));
    for (row, r) in results.into_iter().enumerate() {
        let r = r.map_err(|error| RowError { row, error })?;
        values.extend_from_slice(&r.refined);
        if let (Some(js), Some(j)) = (jacobians.as_mut(), r.jacobian) {
            js.extend_from_slice(&j);
        }
    }
    Ok(BatchOutput { values, jacobians })
}
