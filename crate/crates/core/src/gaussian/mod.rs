//! Riemannian Gaussian distributions on `Q_n`.
//!
//! The density with respect to the Riemannian volume is
//! `exp(−d²(S, S̆)/2σ²) / Z(σ)`. Sampling works in polar coordinates: `K`
//! uniform on `Sp(n)`, the log-eigenvalues `r` from the radial density
//!
//! ```text
//! p(r) ∝ exp(−|r|²/2σ²) · Π_{i<j} sinh⁴(|r_i − r_j|/2)
//! ```
//!
//! and `S = K diag(e^r) K†` has barycentre `I`. Transporting by any `A` with
//! `A·I = S̆` moves the barycentre to `S̆`.
//!
//! `Z(σ)` is never evaluated. Only `ψ′(η) = E[d²(S, S̆)]` is needed
//! (`η = −1/2σ²`, `ψ = log Z`), and it is tabulated by Monte Carlo in
//! [`PsiTable`].

mod psi;
mod radial;
mod symplectic;

pub use psi::{eta_grid, estimate_psi_table, psi_prime_inverse, PsiRow, PsiTable};
pub use radial::{
    ln_sinh, log_acceptance, radial_log_density, sample_radial, sample_radial_chain, MHConfig, RadialChain,
};
pub use symplectic::sample_uniform_sp;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hermitian::HermQMatrix;
use crate::manifold::{distance, SpdQMatrix};

/// Barycentre `S̆` and dispersion `σ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    pub barycentre: SpdQMatrix,
    pub sigma: f64,
}

impl GaussianParams {
    pub fn new(barycentre: SpdQMatrix, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { barycentre, sigma })
    }

    pub fn dim(&self) -> usize {
        self.barycentre.dim()
    }

    /// Natural parameter `η = −1/2σ²`.
    pub fn eta(&self) -> f64 {
        sigma_to_eta(self.sigma)
    }
}

pub fn sigma_to_eta(sigma: f64) -> f64 {
    -0.5 / (sigma * sigma)
}

pub fn eta_to_sigma(eta: f64) -> f64 {
    (-0.5 / eta).sqrt()
}

/// `−d²(S, S̆)/2σ²`, without the normalising constant.
pub fn log_density_unnormalized(s: &SpdQMatrix, p: &GaussianParams) -> Result<f64> {
    let d = distance(s, &p.barycentre)?;
    Ok(-d * d / (2.0 * p.sigma * p.sigma))
}

/// Draws `count` samples: `A K diag(e^r) K† A†` with `A = S̆^{1/2}`, `K`
/// uniform on `Sp(n)` and `r` from [`sample_radial`].
///
/// The radial chain is run first, then the `K` factors are drawn from the
/// same stream, one per sample.
pub fn sample_gaussian<R: Rng + ?Sized>(
    p: &GaussianParams,
    count: usize,
    cfg: &MHConfig,
    rng: &mut R,
) -> Result<Vec<SpdQMatrix>> {
    let n = p.dim();
    let radii = sample_radial(n, p.sigma, cfg, count, rng)?;
    let a = p.barycentre.sqrt();
    radii
        .iter()
        .map(|r| {
            let k = sample_uniform_sp(n, rng)?;
            let ak = a.as_matrix() * k.as_matrix();
            let d = HermQMatrix::real_diagonal(&r.iter().map(|x| x.exp()).collect::<Vec<_>>());
            SpdQMatrix::new(d.congruence(&ak)?)
        })
        .collect()
}
