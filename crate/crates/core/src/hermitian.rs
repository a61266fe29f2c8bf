//! Hermitian and symplectic quaternion matrices, the Hermitian eigendecomposition,
//! polar decomposition and spectral matrix functions.
//!
//! Eigendecompositions go through the complex adjoint: `χ(S)` is a 2n×2n
//! complex Hermitian matrix whose spectrum is that of `S` with every
//! eigenvalue doubled. For a complex eigenvector `w = (w1; w2)` of `χ(S)` the
//! quaternion vector `x = w1 − conj(w2) j` satisfies `S x = x λ`, and the
//! second vector of each pair spans the same quaternion line. One
//! representative per pair is kept by quaternion Gram–Schmidt.

use std::ops::Deref;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;

/// Relative tolerance on `M = M†` for admission.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Frobenius tolerance on `K K† = I` for admission.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Relative gap below which complex-adjoint eigenvalues are grouped together.
pub const PAIRING_TOL: f64 = 1e-8;
/// Residual below which a projected candidate eigenvector is considered dependent.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// A quaternion matrix with `M = M†`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermQMatrix(QMatrix);

impl HermQMatrix {
    /// Admits `m` if it is Hermitian to within `1e-12 · max|m_ij|`, storing its
    /// exact Hermitian part.
    pub fn new(m: QMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = m.hermitian_deviation();
        if dev > HERMITIAN_TOL * m.max_abs() {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Symmetrizes `(m + m†)/2` without checking how far `m` was from Hermitian.
    pub fn from_hermitian_part(m: &QMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub(crate) fn new_unchecked(m: QMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(QMatrix::identity(n))
    }

    pub fn real_diagonal(d: &[f64]) -> Self {
        Self(QMatrix::real_diagonal(d))
    }

    pub fn as_matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn into_inner(self) -> QMatrix {
        self.0
    }

    /// `A M A†`, Hermitian for any `A`.
    pub fn congruence(&self, a: &QMatrix) -> Result<Self> {
        let m = a.mat_mul(&self.0)?.mat_mul(&a.dagger())?;
        Ok(Self(m.hermitian_part()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn eig(&self) -> Result<EigDecomposition> {
        hermitian_eig(self)
    }

    pub fn apply(&self, f: MatrixFn) -> Result<Self> {
        hermitian_fn(self, f)
    }
}

impl Deref for HermQMatrix {
    type Target = QMatrix;
    fn deref(&self) -> &QMatrix {
        &self.0
    }
}

/// An element of the compact symplectic group `Sp(n)`: `K K† = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticQMatrix(QMatrix);

impl SymplecticQMatrix {
    pub fn new(k: QMatrix) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = unitarity_defect(&k);
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { deviation: dev });
        }
        Ok(Self(k))
    }

    pub fn identity(n: usize) -> Self {
        Self(QMatrix::identity(n))
    }

    pub fn as_matrix(&self) -> &QMatrix {
        &self.0
    }

    pub fn into_inner(self) -> QMatrix {
        self.0
    }

    /// `K⁻¹ = K†`.
    pub fn inverse(&self) -> Self {
        Self(self.0.dagger())
    }
}

impl Deref for SymplecticQMatrix {
    type Target = QMatrix;
    fn deref(&self) -> &QMatrix {
        &self.0
    }
}

/// `‖K K† − I‖_F`.
pub fn unitarity_defect(k: &QMatrix) -> f64 {
    (&(k * &k.dagger()) - &QMatrix::identity(k.dim())).frob_norm()
}

/// `S = K diag(λ) K†` with `λ` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: SymplecticQMatrix,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `K diag(f(λ)) K†`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermQMatrix {
        let n = self.dim();
        let k = self.vectors.as_matrix();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = QMatrix::from_fn(n, |i, j| {
            let mut acc = Quaternion::ZERO;
            for (l, &v) in fl.iter().enumerate() {
                acc += k[(i, l)] * (k[(j, l)].conj() * v);
            }
            acc
        });
        HermQMatrix(m.hermitian_part())
    }

    pub fn reconstruct(&self) -> HermQMatrix {
        self.map(|l| l)
    }
}

// Quaternion column vectors form a right ℍ-module with ⟨a, b⟩ = Σ conj(a_i) b_i.
fn inner(a: &[Quaternion], b: &[Quaternion]) -> Quaternion {
    a.iter().zip(b).fold(Quaternion::ZERO, |acc, (&x, &y)| acc + x.conj() * y)
}

fn vec_norm(a: &[Quaternion]) -> f64 {
    a.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(x: &mut [Quaternion], basis: &[Vec<Quaternion>]) {
    // two passes of classical Gram–Schmidt
    for _ in 0..2 {
        for y in basis {
            let c = inner(y, x);
            for (xi, &yi) in x.iter_mut().zip(y) {
                *xi -= yi * c;
            }
        }
    }
}

/// Eigendecomposition of a Hermitian quaternion matrix.
pub fn hermitian_eig(s: &HermQMatrix) -> Result<EigDecomposition> {
    let n = s.dim();
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let eig = SymmetricEigen::new(s.complex_adjoint());
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let tol = PAIRING_TOL * scale;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[idx] - eig.eigenvalues[*c.last().unwrap()] <= tol => c.push(idx),
            _ => clusters.push(vec![idx]),
        }
    }

    let mut basis: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    for cluster in &clusters {
        if cluster.len() % 2 != 0 {
            let l = eig.eigenvalues[cluster[0]];
            return Err(Error::Pairing(format!(
                "eigenvalue {l:e} of the complex adjoint has odd multiplicity {}",
                cluster.len()
            )));
        }
        let mut candidates: Vec<Vec<Quaternion>> = cluster
            .iter()
            .map(|&c| {
                let w = eig.eigenvectors.column(c);
                (0..n)
                    .map(|i| {
                        let w1 = w[i];
                        let w2 = w[i + n];
                        Quaternion::new(w1.re, w1.im, -w2.re, w2.im)
                    })
                    .collect()
            })
            .collect();
        for _ in 0..cluster.len() / 2 {
            let mut best: Option<(usize, Vec<Quaternion>, f64)> = None;
            for (ci, cand) in candidates.iter().enumerate() {
                let mut x = cand.clone();
                project_out(&mut x, &basis);
                let r = vec_norm(&x);
                if best.as_ref().is_none_or(|b| r > b.2) {
                    best = Some((ci, x, r));
                }
            }
            let (ci, mut x, r) = best.expect("cluster has candidates");
            if r < RESIDUAL_TOL {
                return Err(Error::Pairing(format!(
                    "no independent eigenvector left in cluster (residual {r:e})"
                )));
            }
            for xi in x.iter_mut() {
                *xi = *xi / r;
            }
            candidates.swap_remove(ci);
            basis.push(x);
        }
    }
    if basis.len() != n {
        return Err(Error::Pairing(format!("recovered {} of {n} eigenvectors", basis.len())));
    }

    // Rayleigh quotients Re(x† S x) as eigenvalues
    let mut pairs: Vec<(f64, Vec<Quaternion>)> = basis
        .into_iter()
        .map(|x| {
            let sx: Vec<Quaternion> = (0..n)
                .map(|i| (0..n).fold(Quaternion::ZERO, |acc, j| acc + s[(i, j)] * x[j]))
                .collect();
            (inner(&x, &sx).re, x)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let k = QMatrix::from_fn(n, |i, j| pairs[j].1[i]);
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    Ok(EigDecomposition { eigenvalues, vectors: SymplecticQMatrix(k) })
}

/// Scalar functions applicable spectrally to Hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFn {
    Exp,
    Log,
    Sqrt,
    Pow(f64),
}

impl MatrixFn {
    pub fn requires_positive(self) -> bool {
        !matches!(self, MatrixFn::Exp)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            MatrixFn::Exp => x.exp(),
            MatrixFn::Log => x.ln(),
            MatrixFn::Sqrt => x.sqrt(),
            MatrixFn::Pow(t) => x.powf(t),
        }
    }
}

/// `K f(diag(λ)) K†`. Log, sqrt and powers require every eigenvalue to be positive.
pub fn hermitian_fn(s: &HermQMatrix, f: MatrixFn) -> Result<HermQMatrix> {
    let eig = hermitian_eig(s)?;
    if f.requires_positive() {
        if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
            let largest = eig.eigenvalues.last().copied().unwrap_or(0.0);
            return Err(Error::NotPositiveDefinite { eigenvalue: bad, largest });
        }
    }
    Ok(eig.map(|l| f.eval(l)))
}

/// Polar decomposition `Z = K P` with `P = (Z†Z)^{1/2}` and `K ∈ Sp(n)`.
///
/// `K = Z P⁻¹` is polished by Newton–Schulz steps `K ← K(3I − K†K)/2`, which
/// converge quadratically to the same polar factor.
pub fn polar_decomp(z: &QMatrix) -> Result<(SymplecticQMatrix, HermQMatrix)> {
    z.inverse()?;
    let n = z.dim();
    let gram = HermQMatrix::from_hermitian_part(&(&z.dagger() * z));
    let eig = hermitian_eig(&gram)?;
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Singular { pivot: bad.max(0.0).sqrt() });
    }
    let p = eig.map(f64::sqrt);
    let p_inv = eig.map(|l| 1.0 / l.sqrt());
    let mut k = z * p_inv.as_matrix();
    let three = QMatrix::identity(n).scale(3.0);
    for _ in 0..4 {
        if unitarity_defect(&k) <= 1e-15 * n as f64 {
            break;
        }
        let ktk = &k.dagger() * &k;
        k = (&k * &(&three - &ktk)).scale(0.5);
    }
    Ok((SymplecticQMatrix::new(k)?, p))
}
