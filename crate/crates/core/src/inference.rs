//! Maximum-likelihood fitting of a Riemannian Gaussian.
//!
//! The barycentre estimate is the sample Riemannian barycentre, computed by
//! Riemannian gradient descent; the dispersion estimate inverts `ψ′` at the
//! mean squared distance to that barycentre.

use crate::error::{Error, Result};
use crate::gaussian::{eta_to_sigma, psi_prime_inverse, PsiTable};
use crate::hermitian::HermQMatrix;
use crate::manifold::{distance, exp_map, log_map_with_distance, metric_raw, SpdQMatrix, TangentAtS};
use crate::qmatrix::QMatrix;

const MAX_HALVINGS: usize = 30;
const OBJECTIVE_SLACK: f64 = 1e-12;
const MIN_MODEL_STEP: f64 = 0.05;
/// Relative objective change below which the step model is not refit.
const RESOLVABLE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterConfig {
    pub max_iters: usize,
    /// Stop once the metric norm of the mean log-vector falls below this.
    pub grad_tol: f64,
    /// Initial step in `(0, 1]`, halved while the objective increases.
    pub step: f64,
}

impl Default for BarycenterConfig {
    fn default() -> Self {
        Self { max_iters: 200, grad_tol: 1e-9, step: 1.0 }
    }
}

impl BarycenterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("grad_tol must be positive, got {}", self.grad_tol)));
        }
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::InvalidParameter(format!("step must lie in (0, 1], got {}", self.step)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Converged barycentre with its descent history.
#[derive(Debug, Clone)]
pub struct Barycenter {
    pub point: SpdQMatrix,
    pub iterations: usize,
    /// Metric norm of the mean log-vector at `point`.
    pub grad_norm: f64,
    /// `Σ d²(S_i, S_k)` at every iterate, starting from the initial point.
    pub objective: Vec<f64>,
}

// Σ d²(S, S_i), whitened at S.
fn objective(samples: &[SpdQMatrix], s: &SpdQMatrix) -> Result<f64> {
    samples.iter().map(|x| distance(s, x).map(|d| d * d)).sum()
}

// Mean of Log_S(S_i) and Σ d²(S, S_i).
fn mean_log(samples: &[SpdQMatrix], s: &SpdQMatrix) -> Result<(QMatrix, f64)> {
    let mut sum = QMatrix::zeros(s.dim());
    let mut obj = 0.0;
    for x in samples {
        let (l, d) = log_map_with_distance(s, x)?;
        obj += d * d;
        sum = &sum + &l.vec;
    }
    Ok((sum.scale(1.0 / samples.len() as f64), obj))
}

/// Sample Riemannian barycentre `argmin_S Σ d²(S_i, S)`.
///
/// Starts at the first sample and iterates `S ← Exp_S(t · mean_i Log_S(S_i))`.
/// Each iteration tries the previous step length (initially `step`), then the
/// minimiser of the quadratic through the objective, its slope and that
/// trial, and halves while the objective would increase.
pub fn barycenter(samples: &[SpdQMatrix], cfg: &BarycenterConfig) -> Result<Barycenter> {
    cfg.validate()?;
    let first = samples.first().ok_or_else(|| Error::InvalidParameter("no samples".into()))?;
    let n = first.dim();
    if let Some(bad) = samples.iter().find(|s| s.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
    }

    let mut s = first.clone();
    let (mut grad, mut obj) = mean_log(samples, &s)?;
    let mut history = vec![obj];
    let mut last_step = cfg.step;
    for it in 0..=cfg.max_iters {
        let grad_norm = metric_raw(&s, &grad, &grad).max(0.0).sqrt();
        if grad_norm < cfg.grad_tol {
            return Ok(Barycenter { point: s, iterations: it, grad_norm, objective: history });
        }
        if it == cfg.max_iters {
            return Err(Error::NonConvergence { iterations: it, grad_norm });
        }
        let direction = HermQMatrix::from_hermitian_part(&grad);
        let try_step = |t: f64| -> Result<(SpdQMatrix, f64)> {
            let candidate = exp_map(&s, &TangentAtS::new(&s, direction.scale(t))?)?;
            let value = objective(samples, &candidate)?;
            Ok((candidate, value))
        };
        let accept = |value: f64| value <= obj * (1.0 + OBJECTIVE_SLACK) + OBJECTIVE_SLACK;
        // d/dt Σ d²(S_i, Exp_S(t g)) at t = 0 for g = mean Log_S(S_i)
        let slope = -2.0 * samples.len() as f64 * grad_norm * grad_norm;

        let mut step = last_step;
        let (mut best, mut best_obj) = try_step(step)?;
        // Quadratic model through obj, slope and the trial, used only while the
        // trial's change in objective is above round-off.
        let curvature = (best_obj - obj - slope * step) / (step * step);
        if curvature > 0.0 && (best_obj - obj).abs() > RESOLVABLE * obj.abs() {
            let t = (-slope / (2.0 * curvature)).clamp(MIN_MODEL_STEP * step, cfg.step);
            if (t - step).abs() > 0.05 * step {
                let (c, v) = try_step(t)?;
                if v < best_obj {
                    (best, best_obj, step) = (c, v, t);
                }
            }
        }
        let mut next = accept(best_obj).then_some(best);
        for _ in 0..MAX_HALVINGS {
            if next.is_some() {
                break;
            }
            step *= 0.5;
            let (c, v) = try_step(step)?;
            if accept(v) {
                next = Some(c);
            }
        }
        // No decrease even at the smallest step: stop at the round-off floor.
        let Some(candidate) = next else {
            return Err(Error::NonConvergence { iterations: it, grad_norm });
        };
        s = candidate;
        last_step = step;
        (grad, obj) = mean_log(samples, &s)?;
        history.push(obj);
    }
    unreachable!("loop returns at it == max_iters")
}

/// Maximum-likelihood estimates of barycentre and dispersion.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub barycentre: SpdQMatrix,
    pub eta_hat: f64,
    pub sigma_hat: f64,
    /// `(1/N) Σ d²(S_i, Ŝ_N)`.
    pub mean_sq_dist: f64,
    pub iterations: usize,
}

/// Fits barycentre and `η = −1/2σ²`; `σ̂` is always derived from `η̂`.
pub fn fit_mle(samples: &[SpdQMatrix], table: &PsiTable, cfg: &BarycenterConfig) -> Result<FitResult> {
    let n = samples.first().ok_or_else(|| Error::InvalidParameter("no samples".into()))?.dim();
    if table.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: table.dim() });
    }
    let bary = barycenter(samples, cfg)?;
    let mean_sq_dist = objective(samples, &bary.point)? / samples.len() as f64;
    let eta_hat = psi_prime_inverse(table, mean_sq_dist)?;
    Ok(FitResult {
        barycentre: bary.point,
        eta_hat,
        sigma_hat: eta_to_sigma(eta_hat),
        mean_sq_dist,
        iterations: bary.iterations,
    })
}
