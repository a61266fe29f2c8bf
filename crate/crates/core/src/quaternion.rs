//! Scalar quaternions.
//!
//! Components are stored in the order `(re, i, j, k)` and multiply according
//! to `i² = j² = k² = ijk = −1`, so that `ij = k`, `jk = i`, `ki = j`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the quaternion division algebra ℍ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    #[inline]
    pub const fn real(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    /// Real part `Re(q) = q0`.
    #[inline]
    pub fn re(self) -> f64 {
        self.re
    }

    /// Quaternion conjugate `q0 − q1 i − q2 j − q3 k`.
    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    /// Squared norm `|q|² = q q̄`.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse `q̄ / |q|²`.
    ///
    /// Only the exact zero quaternion is rejected; tiny inputs are inverted
    /// as they are.
    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conj() * (1.0 / n2))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.i.is_finite() && self.j.is_finite() && self.k.is_finite()
    }

    /// Imaginary part as a pure quaternion.
    #[inline]
    pub fn imag(self) -> Self {
        Self::new(0.0, self.i, self.j, self.k)
    }

    /// Splits `q = a + b j` into the complex pair `(a, b)` where `a, b ∈ span{1, i}`.
    #[inline]
    pub fn to_complex_pair(self) -> ((f64, f64), (f64, f64)) {
        ((self.re, self.i), (self.j, self.k))
    }

    /// Inverse of [`Quaternion::to_complex_pair`].
    #[inline]
    pub fn from_complex_pair(a: (f64, f64), b: (f64, f64)) -> Self {
        Self::new(a.0, a.1, b.0, b.1)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.re, self.i, self.j, self.k]
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.re, self.i, self.j, self.k)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a0, a1, a2, a3) = (self.re, self.i, self.j, self.k);
        let (b0, b1, b2, b3) = (o.re, o.i, o.j, o.k);
        Self::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self * (1.0 / s)
    }
}
