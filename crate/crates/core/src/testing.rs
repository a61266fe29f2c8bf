//! Random generators for tests, benchmarks and book examples.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::hermitian::HermQMatrix;
use crate::manifold::SpdQMatrix;
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;

/// Quaternion with four i.i.d. standard normal components.
pub fn normal_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Matrix with i.i.d. normal quaternion entries.
pub fn random_qmatrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QMatrix {
    QMatrix::from_fn(n, |_, _| normal_quaternion(rng))
}

/// Gaussian matrix redrawn until its Frobenius condition number is below 1e3.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QMatrix {
    loop {
        let a = random_qmatrix(n, rng);
        if let Ok(inv) = a.inverse() {
            if a.frob_norm() * inv.frob_norm() < 1e3 {
                return a;
            }
        }
    }
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermQMatrix {
    HermQMatrix::new_unchecked(random_qmatrix(n, rng).hermitian_part())
}

pub fn random_skew<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QMatrix {
    let a = random_qmatrix(n, rng);
    (&a - &a.dagger()).scale(0.5)
}

/// `exp(H)` for a random Hermitian `H` scaled to spectral spread of order `scale`.
pub fn random_spd<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SpdQMatrix {
    let h = random_qmatrix(n, rng).hermitian_part().scale(scale / (n as f64).sqrt());
    SpdQMatrix::exp(&HermQMatrix::new_unchecked(h)).expect("exp of a Hermitian matrix is positive-definite")
}
