//! Random-walk Metropolis sampling of the radial density on ℝⁿ.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Burn-in steps between step-size adjustments.
const ADAPT_WINDOW: usize = 500;
const TARGET_ACCEPTANCE: f64 = 0.3;

/// Random-walk Metropolis settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MHConfig {
    /// Proposal standard deviation; `None` starts from `σ/√n`.
    pub step: Option<f64>,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Double or halve the step every 500 burn-in steps toward 30% acceptance.
    pub adapt: bool,
}

impl Default for MHConfig {
    fn default() -> Self {
        Self { step: None, burn_in: 5000, thinning: 10, seed: 0, adapt: true }
    }
}

impl MHConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("MH step must be positive, got {s}")));
            }
        }
        if self.thinning == 0 {
            return Err(Error::InvalidParameter("thinning must be at least 1".into()));
        }
        Ok(())
    }

    /// Stream 0 of `seed`.
    pub fn rng(&self) -> crate::rng::StreamRng {
        crate::rng::stream(self.seed, 0)
    }
}

/// `ln sinh(x)` for `x ≥ 0`, stable for large `x`; `−∞` at `x = 0`.
pub fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

/// `−Σ r_i²/2σ² + 4 Σ_{i<j} ln sinh(|r_i − r_j|/2)`, unnormalized.
pub fn radial_log_density(r: &[f64], sigma: f64) -> f64 {
    let sq: f64 = r.iter().map(|x| x * x).sum();
    let mut lp = -sq / (2.0 * sigma * sigma);
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            lp += 4.0 * ln_sinh(0.5 * (r[i] - r[j]).abs());
        }
    }
    lp
}

/// Log acceptance probability `min(0, lp_proposed − lp_current)` of a symmetric proposal.
#[inline]
pub fn log_acceptance(lp_current: f64, lp_proposed: f64) -> f64 {
    if lp_proposed == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    (lp_proposed - lp_current).min(0.0)
}

/// Output of a radial chain with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialChain {
    pub samples: Vec<Vec<f64>>,
    /// Acceptance rate over the sampling phase.
    pub acceptance_rate: f64,
    /// Proposal step used after burn-in.
    pub step: f64,
}

struct Chain {
    r: Vec<f64>,
    lp: f64,
    sigma: f64,
    proposal: Vec<f64>,
}

impl Chain {
    fn step<R: Rng + ?Sized>(&mut self, step: f64, rng: &mut R) -> bool {
        for (p, &x) in self.proposal.iter_mut().zip(&self.r) {
            let z: f64 = rng.sample(StandardNormal);
            *p = x + step * z;
        }
        let lp_new = radial_log_density(&self.proposal, self.sigma);
        let u: f64 = rng.random();
        if u.ln() < log_acceptance(self.lp, lp_new) {
            std::mem::swap(&mut self.r, &mut self.proposal);
            self.lp = lp_new;
            true
        } else {
            false
        }
    }
}

/// Runs the chain and returns `count` thinned post-burn-in states.
pub fn sample_radial<R: Rng + ?Sized>(
    n: usize,
    sigma: f64,
    cfg: &MHConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    Ok(sample_radial_chain(n, sigma, cfg, count, rng)?.samples)
}

/// Like [`sample_radial`], also reporting the acceptance rate and final step.
///
/// The chain starts at `r_i = σ(i − (n+1)/2)` (1-based `i`), away from the
/// zero set of the sinh factor.
pub fn sample_radial_chain<R: Rng + ?Sized>(
    n: usize,
    sigma: f64,
    cfg: &MHConfig,
    count: usize,
    rng: &mut R,
) -> Result<RadialChain> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let center = (n as f64 + 1.0) / 2.0;
    let r: Vec<f64> = (1..=n).map(|i| sigma * (i as f64 - center)).collect();
    let lp = radial_log_density(&r, sigma);
    let mut chain = Chain { r, lp, sigma, proposal: vec![0.0; n] };
    let mut step = cfg.step.unwrap_or(sigma / (n as f64).sqrt());

    let mut window_accepts = 0usize;
    for it in 1..=cfg.burn_in {
        if chain.step(step, rng) {
            window_accepts += 1;
        }
        if cfg.adapt && it % ADAPT_WINDOW == 0 {
            let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
            if rate > TARGET_ACCEPTANCE {
                step *= 2.0;
            } else if rate < TARGET_ACCEPTANCE {
                step *= 0.5;
            }
            window_accepts = 0;
        }
    }

    let mut samples = Vec::with_capacity(count);
    let mut accepts = 0usize;
    for _ in 0..count {
        for _ in 0..cfg.thinning {
            if chain.step(step, rng) {
                accepts += 1;
            }
        }
        samples.push(chain.r.clone());
    }
    let acceptance_rate = accepts as f64 / (count * cfg.thinning) as f64;
    Ok(RadialChain { samples, acceptance_rate, step })
}
