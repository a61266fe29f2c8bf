//! The manifold `Q_n` of positive-definite quaternion matrices.
//!
//! `GL(n,ℍ)` acts by congruence `A·S = A S A†`, and the metric
//! `(u, v)_S = Re tr(S⁻¹ u S⁻¹ v)` is invariant under this action. Matrix
//! powers and logarithms are always evaluated spectrally, through the
//! eigendecomposition cached in every [`SpdQMatrix`].
//!
//! Geodesics extend to all real `t`; [`geodesic`] does not restrict `t` to
//! `[0, 1]`.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::hermitian::{EigDecomposition, HermQMatrix, SymplecticQMatrix};
use crate::qmatrix::QMatrix;

/// Smallest admissible ratio of the smallest to the largest eigenvalue.
pub const PD_RATIO: f64 = 1e-12;

/// A Hermitian positive-definite quaternion matrix, with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpdQMatrix {
    herm: HermQMatrix,
    eig: EigDecomposition,
}

impl PartialEq for SpdQMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.herm == other.herm
    }
}

impl SpdQMatrix {
    /// Admits `h` if its smallest eigenvalue exceeds `1e-12` times the largest.
    /// Nearly singular inputs are rejected, never regularized.
    pub fn new(h: HermQMatrix) -> Result<Self> {
        let eig = h.eig()?;
        let smallest = eig.eigenvalues[0];
        let largest = *eig.eigenvalues.last().unwrap();
        if !(largest > 0.0) || smallest <= PD_RATIO * largest {
            return Err(Error::NotPositiveDefinite { eigenvalue: smallest, largest });
        }
        Ok(Self { herm: h, eig })
    }

    pub fn from_matrix(m: QMatrix) -> Result<Self> {
        Self::new(HermQMatrix::new(m)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermQMatrix::identity(n)).expect("identity is positive-definite")
    }

    pub fn real_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(HermQMatrix::real_diagonal(d))
    }

    /// `exp(h)` for Hermitian `h`.
    pub fn exp(h: &HermQMatrix) -> Result<Self> {
        Self::new(h.eig()?.map(f64::exp))
    }

    pub fn as_herm(&self) -> &HermQMatrix {
        &self.herm
    }

    pub fn as_matrix(&self) -> &QMatrix {
        self.herm.as_matrix()
    }

    pub fn eig(&self) -> &EigDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    /// `S^t`, defined for every real `t`.
    pub fn pow(&self, t: f64) -> HermQMatrix {
        self.eig.map(|l| l.powf(t))
    }

    pub fn sqrt(&self) -> HermQMatrix {
        self.eig.map(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> HermQMatrix {
        self.eig.map(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> Result<SpdQMatrix> {
        SpdQMatrix::new(self.eig.map(|l| 1.0 / l))
    }

    pub fn log(&self) -> HermQMatrix {
        self.eig.map(f64::ln)
    }

    fn inverse_herm(&self) -> HermQMatrix {
        self.eig.map(|l| 1.0 / l)
    }
}

impl Deref for SpdQMatrix {
    type Target = QMatrix;
    fn deref(&self) -> &QMatrix {
        self.as_matrix()
    }
}

/// A tangent vector `u ∈ T_S Q_n`, identified with a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentAtS {
    pub base: SpdQMatrix,
    pub vec: HermQMatrix,
}

impl TangentAtS {
    pub fn new(base: &SpdQMatrix, vec: HermQMatrix) -> Result<Self> {
        if base.dim() != vec.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: vec.dim() });
        }
        Ok(Self { base: base.clone(), vec })
    }

    /// Pushforward under the action: `A·u = A u A†`, based at `A·S`.
    pub fn act(&self, a: &QMatrix) -> Result<Self> {
        Ok(Self { base: act(a, &self.base)?, vec: self.vec.congruence(a)? })
    }

    /// Norm `sqrt((u, u)_S)`.
    pub fn norm(&self) -> f64 {
        metric_at(&self.base, self, self).expect("same base").max(0.0).sqrt()
    }
}

/// Polar coordinates `(r, K)` with `S = K diag(e^{r_i}) K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCoords {
    pub r: Vec<f64>,
    pub k: SymplecticQMatrix,
}

impl PolarCoords {
    /// Builds canonical coordinates: `r` is sorted ascending and the columns of
    /// `K` are permuted to match.
    pub fn new(r: Vec<f64>, k: SymplecticQMatrix) -> Result<Self> {
        if r.len() != k.dim() {
            return Err(Error::DimensionMismatch { expected: k.dim(), found: r.len() });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut order: Vec<usize> = (0..r.len()).collect();
        order.sort_by(|&a, &b| r[a].total_cmp(&r[b]));
        let km = k.as_matrix();
        let permuted = QMatrix::from_fn(km.dim(), |i, j| km[(i, order[j])]);
        Ok(Self {
            r: order.iter().map(|&i| r[i]).collect(),
            k: SymplecticQMatrix::new(permuted)?,
        })
    }
}

/// `A·S = A S A†`.
pub fn act(a: &QMatrix, s: &SpdQMatrix) -> Result<SpdQMatrix> {
    let h = s.as_herm().congruence(a)?;
    SpdQMatrix::new(h).map_err(|e| match e {
        Error::NotPositiveDefinite { eigenvalue, .. } => Error::Singular { pivot: eigenvalue.max(0.0).sqrt() },
        other => other,
    })
}

/// `(u, v)_S = Re tr(S⁻¹ u S⁻¹ v)`.
pub fn metric_at(s: &SpdQMatrix, u: &TangentAtS, v: &TangentAtS) -> Result<f64> {
    if &u.base != s || &v.base != s {
        return Err(Error::BaseMismatch);
    }
    Ok(metric_raw(s, u.vec.as_matrix(), v.vec.as_matrix()))
}

/// The metric on raw Hermitian matrices, without base bookkeeping.
pub fn metric_raw(s: &SpdQMatrix, u: &QMatrix, v: &QMatrix) -> f64 {
    let s_inv = s.inverse_herm();
    let a = s_inv.as_matrix() * u;
    let b = v * s_inv.as_matrix();
    // Re tr(A B) = ⟨A | B†⟩ and (S⁻¹ v)† = v S⁻¹
    a.frob_inner(&b).expect("dimensions checked by caller")
}

pub fn to_polar(s: &SpdQMatrix) -> PolarCoords {
    let eig = s.eig();
    PolarCoords { r: eig.eigenvalues.iter().map(|l| l.ln()).collect(), k: eig.vectors.clone() }
}

/// `K diag(e^{r_i}) K†`.
pub fn from_polar(p: &PolarCoords) -> Result<SpdQMatrix> {
    let d = HermQMatrix::real_diagonal(&p.r.iter().map(|x| x.exp()).collect::<Vec<_>>());
    SpdQMatrix::new(d.congruence(p.k.as_matrix())?)
}

// S^{-1/2} Q S^{-1/2}
fn whitened(s: &SpdQMatrix, q: &SpdQMatrix) -> Result<EigDecomposition> {
    if s.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: q.dim() });
    }
    let m = q.as_herm().congruence(s.inv_sqrt().as_matrix())?;
    let eig = m.eig()?;
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: bad, largest: *eig.eigenvalues.last().unwrap() });
    }
    Ok(eig)
}

/// `d(S, Q) = ‖log(S^{-1/2} Q S^{-1/2})‖ = sqrt(Σ log² μ_i)`.
pub fn distance(s: &SpdQMatrix, q: &SpdQMatrix) -> Result<f64> {
    if s == q {
        return Ok(0.0);
    }
    let eig = whitened(s, q)?;
    Ok(eig.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `γ(t) = S^{1/2} (S^{-1/2} Q S^{-1/2})^t S^{1/2}`.
pub fn geodesic(s: &SpdQMatrix, q: &SpdQMatrix, t: f64) -> Result<SpdQMatrix> {
    let m_t = whitened(s, q)?.map(|l| l.powf(t));
    SpdQMatrix::new(m_t.congruence(s.sqrt().as_matrix())?)
}

/// `Exp_S(u) = S^{1/2} exp(S^{-1/2} u S^{-1/2}) S^{1/2}`.
pub fn exp_map(s: &SpdQMatrix, u: &TangentAtS) -> Result<SpdQMatrix> {
    if &u.base != s {
        return Err(Error::BaseMismatch);
    }
    let w = u.vec.congruence(s.inv_sqrt().as_matrix())?;
    let e = w.eig()?.map(f64::exp);
    SpdQMatrix::new(e.congruence(s.sqrt().as_matrix())?)
}

/// `Log_S(Q) = S^{1/2} log(S^{-1/2} Q S^{-1/2}) S^{1/2}`.
pub fn log_map(s: &SpdQMatrix, q: &SpdQMatrix) -> Result<TangentAtS> {
    Ok(log_map_with_distance(s, q)?.0)
}

/// `Log_S(Q)` together with `d(S, Q)`, both from one eigendecomposition.
///
/// The distance is `sqrt(Σ log² μ_i)` on the same whitened spectrum.
pub fn log_map_with_distance(s: &SpdQMatrix, q: &SpdQMatrix) -> Result<(TangentAtS, f64)> {
    let eig = whitened(s, q)?;
    let d = eig.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt();
    let l = eig.map(f64::ln);
    Ok((TangentAtS::new(s, l.congruence(s.sqrt().as_matrix())?)?, d))
}

/// Squared length `Σ dr_i² + 8 Σ_{i<j} sinh²(|r_i − r_j|/2) |X_ij|²` of the
/// velocity of `t ↦ exp(tX) diag(e^{r + t dr}) exp(tX)†` at `t = 0`, where `X`
/// is skew-Hermitian (an element of `sp(n)`).
pub fn polar_length_element(r: &[f64], dr: &[f64], x: &QMatrix) -> Result<f64> {
    let n = x.dim();
    if r.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r.len() });
    }
    if dr.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: dr.len() });
    }
    let dev = x.skew_deviation();
    if dev > 1e-12 * x.max_abs().max(1.0) {
        return Err(Error::NotSkew { deviation: dev });
    }
    let radial: f64 = dr.iter().map(|d| d * d).sum();
    let mut angular = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            angular += (0.5 * (r[i] - r[j]).abs()).sinh().powi(2) * x[(i, j)].norm_sqr();
        }
    }
    Ok(radial + 8.0 * angular)
}
