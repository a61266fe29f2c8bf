//! Riemannian geometry of positive-definite quaternion matrices and
//! Riemannian Gaussian distributions on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`quaternion`]: the division algebra ℍ.
//! - [`qmatrix`]: the algebra `M_n(ℍ)`, inverses, the complex adjoint and the
//!   series exponential.
//! - [`hermitian`]: Hermitian and symplectic matrices, eigendecomposition,
//!   polar decomposition and spectral functions.
//! - [`manifold`]: the manifold `Q_n` with its invariant metric, geodesics,
//!   distance and exponential/logarithm maps.
//! - [`gaussian`]: densities, samplers and the `ψ′` table.
//! - [`inference`]: barycentre and maximum-likelihood fitting.
//! - [`io`]: the JSON interchange formats used by the `qspd` binary.
//!
//! ```
//! use qspd::manifold::{distance, geodesic};
//! use qspd::SpdQMatrix;
//!
//! let a = SpdQMatrix::real_diagonal(&[1.0, 1.0]).unwrap();
//! let b = SpdQMatrix::real_diagonal(&[3f64.exp(), 4f64.exp()]).unwrap();
//! assert!((distance(&a, &b).unwrap() - 5.0).abs() < 1e-12);
//!
//! let mid = geodesic(&a, &b, 0.5).unwrap();
//! assert!((distance(&a, &mid).unwrap() - 2.5).abs() < 1e-12);
//! ```

pub mod error;
pub mod gaussian;
pub mod hermitian;
pub mod inference;
pub mod io;
pub mod manifold;
pub mod qmatrix;
pub mod quaternion;
pub mod rng;
pub mod testing;

pub use error::{Error, Result};
pub use gaussian::{GaussianParams, MHConfig, PsiTable};
pub use hermitian::{EigDecomposition, HermQMatrix, MatrixFn, SymplecticQMatrix};
pub use inference::{BarycenterConfig, FitResult};
pub use manifold::{PolarCoords, SpdQMatrix, TangentAtS};
pub use qmatrix::QMatrix;
pub use quaternion::Quaternion;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quaternions.md")]
    mod quaternions {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/manifold.md")]
    mod manifold {}
    #[doc = include_str!("../../../book/src/gaussian.md")]
    mod gaussian {}
    #[doc = include_str!("../../../book/src/inference.md")]
    mod inference {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
