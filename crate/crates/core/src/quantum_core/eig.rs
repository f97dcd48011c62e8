//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{hermiticity_residual, is_finite, tol, ComplexMatrix, UnitaryMatrix};
use crate::error::{precondition, Error, Result};

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: UnitaryMatrix,
}

impl HermitianEigen {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.matrix();
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lambda);
        }
        scaled * v.adjoint()
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation zeroes the `(p, q)` entry using
/// `R = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]` with `e^{iφ} = a_pq/|a_pq|`, which is a
/// real symmetric Schur rotation conjugated by a diagonal phase.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(precondition(format!(
            "eigendecomposition needs a nonempty square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if !is_finite(h) {
        return Err(precondition("matrix has non-finite entries"));
    }
    let herm = hermiticity_residual(h);
    if herm > tol::HERM {
        return Err(precondition(format!("matrix is not Hermitian (residual {herm:e})")));
    }

    let n = h.nrows();
    let mut a = (h + h.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(n, n);
    let frob = a.norm();
    let target = f64::EPSILON * frob;

    let mut converged = frob == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Entry already negligible against both diagonals: drop it.
                if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s; // R_pq
                let s_ph_conj = s_ph.conj(); // −R_qp

                // A ← A R
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * s_ph_conj;
                    a[(k, q)] = akp * s_ph + akq * c;
                }
                // A ← R† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * s_ph;
                    a[(q, k)] = apk * s_ph_conj + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V ← V R
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s_ph_conj;
                    v[(k, q)] = vkp * s_ph + vkq * c;
                }
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: UnitaryMatrix::new_unchecked(eigenvectors),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::matrix::{max_abs, unitarity_residual, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        &a + a.adjoint()
    }

    #[test]
    fn diagonal_input_is_returned_as_is() {
        let h = ComplexMatrix::from_row_slice(2, 2, &[Complex64::new(0.3, 0.0), ZERO, ZERO, Complex64::new(0.7, 0.0)]);
        let e = hermitian_eig(&h).unwrap();
        assert_eq!(e.eigenvalues, vec![0.3, 0.7]);
        assert_eq!(e.eigenvectors.matrix(), &ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn pauli_x() {
        let h = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let e = hermitian_eig(&h).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_7x7_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(7, &mut rng);
        let e = hermitian_eig(&h).unwrap();
        assert!(max_abs(&(e.reconstruct() - &h)) < 1e-10);
        assert!(unitarity_residual(e.eigenvectors.matrix()) < 1e-12);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let norm = max_abs(&h);
        for k in 0..7 {
            let vk = e.eigenvectors.column(k);
            let r = &h * &vk - vk.scale(e.eigenvalues[k]);
            let worst = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst <= tol::EIG * norm.max(1.0), "{worst}");
        }
    }

    #[test]
    fn agrees_with_nalgebra_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 3, 5, 9, 14] {
            let h = random_hermitian(n, &mut rng);
            let ours = hermitian_eig(&h).unwrap().eigenvalues;
            let mut theirs: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let h = ComplexMatrix::identity(4, 4).scale(2.0);
        let e = hermitian_eig(&h).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| (l - 2.0).abs() < 1e-15));
    }

    #[test]
    fn non_hermitian_is_a_precondition_error() {
        let h = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(hermitian_eig(&h), Err(Error::Precondition(_))));
    }
}
