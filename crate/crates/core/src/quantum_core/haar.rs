use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::eig::hermitian_eig;
use super::matrix::{ComplexMatrix, UnitaryMatrix};
use crate::error::{precondition, Result};

/// Samples a Haar-distributed unitary as the eigenvector matrix of `A + A†`,
/// where `A` has i.i.d. standard complex Gaussian entries.
///
/// Column phases are fixed so that the largest-modulus entry of every column is
/// real and positive (first such entry on ties).
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(precondition("Haar unitary dimension must be at least 1"));
    }
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let gue = &a + a.adjoint();
    let mut u = hermitian_eig(&gue)?.eigenvectors.into_matrix();
    for mut col in u.column_iter_mut() {
        let mut pivot = col[0];
        for z in col.iter() {
            if z.norm() > pivot.norm() {
                pivot = *z;
            }
        }
        let phase = pivot.conj() / pivot.norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
    Ok(UnitaryMatrix::new_unchecked(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::matrix::unitarity_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_dimensional_is_unit_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = sample_haar_unitary(1, &mut rng).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_dim_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn unitary_across_seeds_and_dims() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for dim in 2..=14 {
                let u = sample_haar_unitary(dim, &mut rng).unwrap();
                assert!(unitarity_residual(u.matrix()) <= 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let u1 = sample_haar_unitary(6, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let u2 = sample_haar_unitary(6, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(u1, u2);
    }

    #[test]
    fn phase_convention() {
        let u = sample_haar_unitary(5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for col in u.matrix().column_iter() {
            let big = col.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            assert!(big.im.abs() < 1e-15 && big.re > 0.0);
        }
    }

    /// Independent Haar sampler: QR of a Ginibre matrix with the R-diagonal
    /// phases absorbed into Q.
    fn qr_haar(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let qr = a.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..dim {
            let d = r[(j, j)];
            let ph = d / d.norm();
            for i in 0..dim {
                q[(i, j)] *= ph;
            }
        }
        q
    }

    #[test]
    fn first_moment_matches_qr_oracle() {
        let samples = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut ours = 0.0;
        let mut oracle = 0.0;
        for _ in 0..samples {
            ours += sample_haar_unitary(2, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr();
            oracle += qr_haar(2, &mut rng)[(0, 0)].norm_sqr();
        }
        ours /= samples as f64;
        oracle /= samples as f64;
        assert!((oracle - 0.5).abs() < 0.02, "oracle {oracle}");
        assert!((ours - 0.5).abs() < 0.02, "ours {ours}");
    }
}
