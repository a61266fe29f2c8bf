//! Monte-Carlo tabulation of `ψ′(η) = E[d²(S, S̆)]` and its inverse.
//!
//! `ψ′(η)` equals the mean of `Σ r_i²` under the radial density with
//! `σ² = −1/2η`, so each grid node needs one radial chain. Nodes are
//! independent and may be computed on several workers; node `i` always
//! draws from stream `i` of the configured seed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::radial::{sample_radial, MHConfig};
use super::{eta_to_sigma, sigma_to_eta};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Batches used for the batch-means standard error.
const BATCHES: usize = 50;
/// Relative spread applied to ties left by isotonic pooling.
const TIE_SPREAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiRow {
    pub eta: f64,
    pub psi_prime: f64,
    pub stderr: f64,
}

/// Monotone table of `ψ′` over an ascending grid of negative `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PsiTableRepr", into = "PsiTableRepr")]
pub struct PsiTable {
    n: usize,
    rows: Vec<PsiRow>,
}

#[derive(Serialize, Deserialize)]
struct PsiTableRepr {
    n: usize,
    rows: Vec<PsiRow>,
}

impl TryFrom<PsiTableRepr> for PsiTable {
    type Error = Error;
    fn try_from(r: PsiTableRepr) -> Result<Self> {
        PsiTable::new(r.n, r.rows)
    }
}

impl From<PsiTable> for PsiTableRepr {
    fn from(t: PsiTable) -> Self {
        PsiTableRepr { n: t.n, rows: t.rows }
    }
}

impl PsiTable {
    /// Validates the table: `η` ascending and negative, `ψ′` positive and strictly increasing.
    pub fn new(n: usize, rows: Vec<PsiRow>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("table dimension must be at least 1".into()));
        }
        if rows.is_empty() {
            return Err(Error::InvalidParameter("table has no rows".into()));
        }
        for row in &rows {
            if !(row.eta < 0.0) || !row.eta.is_finite() {
                return Err(Error::InvalidParameter(format!("eta must be negative, got {}", row.eta)));
            }
            if !(row.psi_prime > 0.0) || !row.psi_prime.is_finite() {
                return Err(Error::InvalidParameter(format!("psi' must be positive, got {}", row.psi_prime)));
            }
            if !(row.stderr >= 0.0) {
                return Err(Error::InvalidParameter(format!("stderr must be nonnegative, got {}", row.stderr)));
            }
        }
        for w in rows.windows(2) {
            if !(w[0].eta < w[1].eta) {
                return Err(Error::InvalidParameter("eta grid must be strictly ascending".into()));
            }
            if !(w[0].psi_prime < w[1].psi_prime) {
                return Err(Error::InvalidParameter("psi' must be strictly increasing in eta".into()));
            }
        }
        Ok(Self { n, rows })
    }

    /// The exact table for `n = 1`, where `ψ′(η) = −1/2η = σ²`.
    pub fn scalar_exact(etas: &[f64]) -> Result<Self> {
        let rows = etas.iter().map(|&eta| PsiRow { eta, psi_prime: -0.5 / eta, stderr: 0.0 }).collect();
        Self::new(1, rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PsiRow] {
        &self.rows
    }

    pub fn etas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.eta).collect()
    }

    pub fn psi_prime(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.psi_prime).collect()
    }

    pub fn stderr(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.stderr).collect()
    }

    /// `[min ψ′, max ψ′]`.
    pub fn range(&self) -> (f64, f64) {
        (self.rows[0].psi_prime, self.rows[self.rows.len() - 1].psi_prime)
    }

    /// Piecewise-linear `ψ′`, interpolated in `σ²` like [`psi_prime_inverse`].
    pub fn psi_prime_at(&self, eta: f64) -> Result<f64> {
        let (lo, hi) = (self.rows[0].eta, self.rows[self.rows.len() - 1].eta);
        if !(eta >= lo && eta <= hi) {
            return Err(Error::OutOfRange { value: eta, min: lo, max: hi });
        }
        if let Some(row) = self.rows.iter().find(|r| r.eta == eta) {
            return Ok(row.psi_prime);
        }
        let k = self.rows.partition_point(|r| r.eta < eta) - 1;
        let (a, b) = (&self.rows[k], &self.rows[k + 1]);
        let (sa, sb, s) = (-0.5 / a.eta, -0.5 / b.eta, -0.5 / eta);
        Ok(a.psi_prime + (s - sa) / (sb - sa) * (b.psi_prime - a.psi_prime))
    }
}

/// `points` values of `η` in `[eta_min, eta_max]`, geometrically spaced in `−η`
/// (equivalently in `σ`).
pub fn eta_grid(eta_min: f64, eta_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(eta_min < eta_max && eta_max < 0.0) || !eta_min.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need eta_min < eta_max < 0, got [{eta_min}, {eta_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidParameter("an eta grid needs at least 2 points".into()));
    }
    let (a, b) = ((-eta_min).ln(), (-eta_max).ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| -(a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid[0] = eta_min;
    grid[points - 1] = eta_max;
    Ok(grid)
}

struct NodeEstimate {
    mean: f64,
    stderr: f64,
}

fn estimate_node(n: usize, eta: f64, samples: usize, cfg: &MHConfig, index: u64) -> Result<NodeEstimate> {
    let sigma = eta_to_sigma(eta);
    let mut rng = stream(cfg.seed, index);
    let values: Vec<f64> = sample_radial(n, sigma, cfg, samples, &mut rng)?
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum())
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(NodeEstimate { mean, stderr: batch_means_stderr(&values, mean) })
}

/// Standard error of the mean of a correlated series by non-overlapping batch means.
pub(crate) fn batch_means_stderr(values: &[f64], mean: f64) -> f64 {
    let len = values.len();
    if len < 2 {
        return 0.0;
    }
    let batches = BATCHES.min(len / 2).max(2).min(len);
    let size = len / batches;
    let batch_means: Vec<f64> = (0..batches)
        .map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = if size * batches == len { mean } else { batch_means.iter().sum::<f64>() / batches as f64 };
    let var = batch_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Weighted pool-adjacent-violators fit, non-decreasing.
pub(crate) fn isotonic(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (value, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (v2, w2, l2) = blocks.pop().unwrap();
            let (v1, w1, l1) = blocks.pop().unwrap();
            let w = w1 + w2;
            blocks.push(((v1 * w1 + v2 * w2) / w, w, l1 + l2));
        }
    }
    blocks.into_iter().flat_map(|(v, _, l)| std::iter::repeat_n(v, l)).collect()
}

// Pooled blocks are flat; spread them by a relative 1e-9 so the table is strictly increasing.
fn break_ties(values: &mut [f64]) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] == values[start] {
            end += 1;
        }
        let len = end - start;
        if len > 1 {
            let v = values[start];
            let mid = (len - 1) as f64 / 2.0;
            for (k, x) in values[start..end].iter_mut().enumerate() {
                *x = v * (1.0 + TIE_SPREAD * (k as f64 - mid));
            }
        }
        start = end;
    }
}

/// Tabulates `ψ′` on `etas` with `samples_per_eta` radial draws per node.
///
/// Node `i` uses stream `i` of `cfg.seed`, so the table does not depend on
/// `workers`. Raw estimates are made monotone by weighted isotonic
/// regression (weights `1/stderr²`).
pub fn estimate_psi_table(
    n: usize,
    etas: &[f64],
    samples_per_eta: usize,
    cfg: &MHConfig,
    workers: usize,
) -> Result<PsiTable> {
    if etas.is_empty() {
        return Err(Error::InvalidParameter("no eta values".into()));
    }
    if let Some(&bad) = etas.iter().find(|&&e| !(e < 0.0)) {
        return Err(Error::InvalidParameter(format!("eta must be negative, got {bad}")));
    }
    if etas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("eta grid must be strictly ascending".into()));
    }
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let nodes: Vec<NodeEstimate> = pool.install(|| {
        etas.par_iter()
            .enumerate()
            .map(|(i, &eta)| estimate_node(n, eta, samples_per_eta, cfg, i as u64))
            .collect::<Result<Vec<_>>>()
    })?;

    let raw: Vec<f64> = nodes.iter().map(|e| e.mean).collect();
    let weights: Vec<f64> =
        nodes.iter().map(|e| if e.stderr > 0.0 { 1.0 / (e.stderr * e.stderr) } else { 1.0 }).collect();
    let mut fitted = isotonic(&raw, &weights);
    break_ties(&mut fitted);
    let rows = etas
        .iter()
        .zip(fitted)
        .zip(&nodes)
        .map(|((&eta, psi_prime), node)| PsiRow { eta, psi_prime, stderr: node.stderr })
        .collect();
    PsiTable::new(n, rows)
}

/// Solves `ψ′(η) = c` on the table.
///
/// Interpolation is linear in `σ² = −1/2η` between nodes, which is exact for
/// `n = 1` where `ψ′ = σ²`. Values outside the tabulated range are refused.
pub fn psi_prime_inverse(table: &PsiTable, c: f64) -> Result<f64> {
    let (lo, hi) = table.range();
    if !(c >= lo && c <= hi) {
        return Err(Error::OutOfRange { value: c, min: lo, max: hi });
    }
    let rows = table.rows();
    if let Some(row) = rows.iter().find(|r| r.psi_prime == c) {
        return Ok(row.eta);
    }
    let k = rows.partition_point(|r| r.psi_prime < c) - 1;
    let (a, b) = (&rows[k], &rows[k + 1]);
    let (sa, sb) = (-0.5 / a.eta, -0.5 / b.eta);
    let s = sa + (c - a.psi_prime) / (b.psi_prime - a.psi_prime) * (sb - sa);
    Ok(sigma_to_eta(s.sqrt()))
}
