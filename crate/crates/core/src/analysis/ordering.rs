//! Variable-ordering heuristics.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AnalysisError;
use crate::algebra::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderMethod {
    Given,
    Random { seed: u64 },
    Corr,
    Kde { bins: usize },
    File,
}

impl fmt::Display for OrderMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderMethod::Given => write!(f, "given"),
            OrderMethod::Random { seed } => write!(f, "random:{seed}"),
            OrderMethod::Corr => write!(f, "corr"),
            OrderMethod::Kde { bins } => write!(f, "kde:{bins}"),
            OrderMethod::File => write!(f, "file"),
        }
    }
}

/// A permutation of `0..D`: `order[i]` is the `i`-th variable refined.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableOrdering {
    pub order: Vec<Var>,
    pub method: OrderMethod,
    /// Per-variable scores for the data-driven methods (index order).
    pub scores: Option<Vec<f64>>,
}

impl VariableOrdering {
    pub fn given(d: usize) -> Self {
        VariableOrdering { order: (0..d).collect(), method: OrderMethod::Given, scores: None }
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.order.len()];
        self.order.iter().all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
    }

    pub fn names<'a>(&self, names: &'a [String]) -> Vec<&'a str> {
        self.order.iter().map(|&v| names[v].as_str()).collect()
    }
}

/// Fisher-Yates shuffle of `0..d` driven by ChaCha8 seeded from `seed`.
pub fn ordering_random(d: usize, seed: u64) -> VariableOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<Var> = (0..d).collect();
    order.shuffle(&mut rng);
    VariableOrdering { order, method: OrderMethod::Random { seed }, scores: None }
}

/// Ascending by score, ties by index.
fn rank(scores: &[f64]) -> Vec<Var> {
    let mut idx: Vec<Var> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    idx
}

fn check_shapes(real: &[Vec<f64>], syn: &[Vec<f64>], min_rows: usize) -> Result<usize, AnalysisError> {
    let d = real.first().or(syn.first()).map_or(0, Vec::len);
    for (name, rows) in [("real", real), ("synthetic", syn)] {
        if rows.len() < min_rows {
            return Err(AnalysisError::TooFewRows { which: name, got: rows.len(), need: min_rows });
        }
        if let Some(r) = rows.iter().position(|r| r.len() != d) {
            return Err(AnalysisError::RaggedRow { which: name, row: r });
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(AnalysisError::NonFinite { which: name });
        }
    }
    Ok(d)
}

/// Rows in a canonical order so the floating-point sums below do not
/// depend on the input row order.
fn sorted_rows(rows: &[Vec<f64>]) -> Vec<&[f64]> {
    let mut out: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    out.sort_by(|a, b| {
        a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    });
    out
}

/// Pearson correlation matrix; pairs with a zero-variance column are 0.
pub fn pearson_matrix(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = sorted_rows(rows);
    let d = rows.first().map_or(0, |r| r.len());
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in &rows {
        for j in 0..d {
            let dj = r[j] - mean[j];
            for k in j..d {
                cov[j][k] += dj * (r[k] - mean[k]);
            }
        }
    }
    let mut corr = vec![vec![0.0; d]; d];
    for j in 0..d {
        for k in j..d {
            let denom = (cov[j][j] * cov[k][k]).sqrt();
            let c = if denom > 0.0 { (cov[j][k] / denom).clamp(-1.0, 1.0) } else { 0.0 };
            corr[j][k] = c;
            corr[k][j] = c;
        }
    }
    corr
}

/// Variables whose pairwise correlations are best preserved come first:
/// `score_j = sum_{k != j} |corr_real(j,k) - corr_syn(j,k)|`.
pub fn ordering_corr(real: &[Vec<f64>], syn: &[Vec<f64>]) -> Result<VariableOrdering, AnalysisError> {
    let d = check_shapes(real, syn, 2)?;
    let cr = pearson_matrix(real);
    let cs = pearson_matrix(syn);
    let scores: Vec<f64> =
        (0..d).map(|j| (0..d).filter(|&k| k != j).map(|k| (cr[j][k] - cs[j][k]).abs()).sum()).collect();
    Ok(VariableOrdering { order: rank(&scores), method: OrderMethod::Corr, scores: Some(scores) })
}

const LAPLACE_ALPHA: f64 = 1e-9;

/// Smoothed histogram over `[lo, hi]` with `bins` equal-width bins.
fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let width = (hi - lo) / bins as f64;
    for x in values {
        let b = (((x - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        h[b] += 1.0;
    }
    let total: f64 = h.iter().sum::<f64>() + LAPLACE_ALPHA * bins as f64;
    h.iter().map(|c| (c + LAPLACE_ALPHA) / total).collect()
}

/// `KL(p || q)` in nats.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).ln()).sum()
}

/// Variables whose marginal histogram is closest to the real one come
/// first: `score_j = KL(real_j || syn_j)`.
pub fn ordering_kde(real: &[Vec<f64>], syn: &[Vec<f64>], bins: usize) -> Result<VariableOrdering, AnalysisError> {
    if bins < 2 {
        return Err(AnalysisError::TooFewBins(bins));
    }
    let d = check_shapes(real, syn, 1)?;
    let scores: Vec<f64> = (0..d)
        .map(|j| {
            let all = real.iter().chain(syn).map(|r| r[j]);
            let lo = all.clone().fold(f64::INFINITY, f64::min);
            let hi = all.fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                return 0.0;
            }
            let p = histogram(real.iter().map(|r| r[j]), lo, hi, bins);
            let q = histogram(syn.iter().map(|r| r[j]), lo, hi, bins);
            kl_divergence(&p, &q)
        })
        .collect();
    Ok(VariableOrdering { order: rank(&scores), method: OrderMethod::Kde { bins }, scores: Some(scores) })
}

/// Reads an ordering file: names separated by newlines or commas, `#`
/// comments allowed. Every variable must appear exactly once.
pub fn parse_ordering_file(text: &str, names: &[String]) -> Result<VariableOrdering, AnalysisError> {
    let mut order = Vec::with_capacity(names.len());
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let tok = tok.trim_matches('"');
            let v = names
                .iter()
                .position(|n| n == tok)
                .ok_or_else(|| AnalysisError::BadOrdering(format!("unknown variable `{tok}`")))?;
            order.push(v);
        }
    }
    let o = VariableOrdering { order, method: OrderMethod::File, scores: None };
    if o.order.len() != names.len() || !o.is_permutation() {
        return Err(AnalysisError::BadOrdering(format!("expected each of the {} variables exactly once", names.len())));
    }
    Ok(o)
}

/// One name per line, readable by [`parse_ordering_file`].
pub fn format_ordering_file(o: &VariableOrdering, names: &[String]) -> String {
    o.names(names).iter().map(|n| format!("{n}\n")).collect()
}
