//! Dense square quaternion matrices, the algebra `M_n(ℍ)`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Complex 2n×2n matrix produced by [`QMatrix::complex_adjoint`].
pub type CMatrix = DMatrix<Complex<f64>>;

/// An n×n quaternion matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "quaternion matrices must have dimension >= 1");
        Self { n, data: vec![Quaternion::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        assert!(n >= 1, "quaternion matrices must have dimension >= 1");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Quaternion>) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != entries.len() {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data: entries })
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Self::from_row_major(rows.concat())
    }

    pub fn diagonal(d: &[Quaternion]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn real_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Quaternion::real(x);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Quaternion]> {
        self.data.chunks(self.n)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Product `C_ij = Σ_l A_il B_lj`, factors kept in left-to-right order.
    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[l * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose `(A†)_ij = conj(A_ji)`.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&q| q * s).collect() }
    }

    /// Quaternion trace (generally `tr(AB) ≠ tr(BA)`; only the real part is cyclic).
    pub fn trace(&self) -> Quaternion {
        (0..self.n).fold(Quaternion::ZERO, |acc, i| acc + self[(i, i)])
    }

    /// The real scalar product `⟨X|Y⟩ = Re tr(X Y†)`.
    pub fn frob_inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.i * b.i + a.j * b.j + a.k * b.k)
            .sum())
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Maximum entrywise deviation from `A = A†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.n;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Maximum entrywise deviation from `A = −A†`.
    pub fn skew_deviation(&self) -> f64 {
        let n = self.n;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] + self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Lie bracket `[X, Y] = XY − YX`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(&self.mat_mul(other)? - &other.mat_mul(self)?)
    }

    /// Inverse by Gauss–Jordan elimination over ℍ with partial pivoting on entry norm.
    ///
    /// All row operations are left multiplications, so the result is the
    /// two-sided inverse. A pivot whose norm falls below `n·ε·max|A_ij|`
    /// is reported as singular.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let threshold = (n as f64) * f64::EPSILON * self.max_abs();
        for col in 0..n {
            let (p, pivot_norm) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_norm <= threshold || pivot_norm == 0.0 {
                return Err(Error::Singular { pivot: pivot_norm.max(0.0) });
            }
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pinv = a[(col, col)].inv()?;
            for j in 0..n {
                a[(col, j)] = pinv * a[(col, j)];
                inv[(col, j)] = pinv * inv[(col, j)];
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let n = self.n;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
    }

    /// Complex adjoint `χ(A) = [[A1, A2], [−conj(A2), conj(A1)]]` where `A = A1 + A2 j`.
    ///
    /// `χ` is an injective algebra homomorphism `M_n(ℍ) → M_2n(ℂ)` with
    /// `χ(A†) = χ(A)^H`.
    pub fn complex_adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut c = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let ((a_re, a_im), (b_re, b_im)) = self[(i, j)].to_complex_pair();
                let a1 = Complex::new(a_re, a_im);
                let a2 = Complex::new(b_re, b_im);
                c[(i, j)] = a1;
                c[(i, j + n)] = a2;
                c[(i + n, j)] = -a2.conj();
                c[(i + n, j + n)] = a1.conj();
            }
        }
        c
    }

    /// Inverse of [`QMatrix::complex_adjoint`] reading the top block row.
    pub fn from_complex_adjoint(c: &CMatrix) -> Result<Self> {
        if c.nrows() != c.ncols() || c.nrows() % 2 != 0 || c.nrows() == 0 {
            return Err(Error::InvalidParameter("complex adjoint must be 2n×2n".into()));
        }
        let n = c.nrows() / 2;
        Ok(Self::from_fn(n, |i, j| {
            let a1 = c[(i, j)];
            let a2 = c[(i, j + n)];
            Quaternion::from_complex_pair((a1.re, a1.im), (a2.re, a2.im))
        }))
    }

    /// General matrix exponential by scaling and squaring of the truncated power series.
    ///
    /// Scales until `‖X‖/2^s ≤ 0.5` and sums 20 terms. Intended for
    /// non-Hermitian arguments (curves in `sp(n)`); Hermitian inputs should go
    /// through the spectral route in [`crate::hermitian`].
    pub fn expm(&self) -> Self {
        let norm = self.frob_norm();
        let mut s = 0u32;
        while norm / 2f64.powi(s as i32) > 0.5 {
            s += 1;
        }
        let x = self.scale(1.0 / 2f64.powi(s as i32));
        let mut sum = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for m in 1..=20 {
            term = (&term * &x).scale(1.0 / m as f64);
            sum = &sum + &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}

/// Panics on dimension mismatch; use [`QMatrix::mat_mul`] for a checked product.
impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.mat_mul(rhs).expect("dimension mismatch in quaternion matrix product")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in quaternion matrix sum");
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in quaternion matrix difference");
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.scale(-1.0)
    }
}
