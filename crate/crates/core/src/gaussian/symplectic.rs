//! Haar-uniform sampling on `Sp(n)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hermitian::{polar_decomp, SymplecticQMatrix};
use crate::testing::random_qmatrix;

const MAX_RETRIES: usize = 16;

/// Polar factor `K` of `Z = K P`, where `Z` has i.i.d. entries with four
/// i.i.d. standard normal components. `K` is uniform on `Sp(n)`.
///
/// A singular draw (probability zero) is redrawn, at most 16 times.
pub fn sample_uniform_sp<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SymplecticQMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut last = None;
    for _ in 0..MAX_RETRIES {
        let z = random_qmatrix(n, rng);
        match polar_decomp(&z) {
            Ok((k, _)) => return Ok(k),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::unitarity_defect;
    use crate::rng::stream;

    #[test]
    fn output_is_symplectic() {
        let mut rng = stream(5, 0);
        for n in [1, 2, 3, 5] {
            for _ in 0..50 {
                let k = sample_uniform_sp(n, &mut rng).unwrap();
                assert!(unitarity_defect(&k) <= 1e-10);
                assert!(unitarity_defect(&k.dagger()) <= 1e-10);
            }
        }
    }
}
