//! Seeded random states and unitaries for property checks and demos.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Ket, Matrix};
use crate::scalar::{Real, C};
use crate::simulate::DensityMatrix;

/// Deterministic generator used by every seeded routine in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Haar-random unit vector in `C^d`.
pub fn haar_ket<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket<T> {
    loop {
        let amps: Vec<C<T>> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(k) = Ket::normalize(amps) {
            return k;
        }
    }
}

/// Haar-random `d × d` unitary: Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<T> {
    let mut rows: Vec<Vec<C<T>>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<C<T>> = (0..d).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for r in &rows {
                let proj: C<T> = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(r) {
                    *x = *x - proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-6) {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    Matrix::from_rows(&rows).expect("square by construction")
}

/// Random mixed state: a convex combination of `terms` Haar-random pure states.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(d: usize, terms: usize, rng: &mut R) -> DensityMatrix<T> {
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = Matrix::zeros(d, d);
    for w in weights {
        let psi = haar_ket::<T, R>(d, rng);
        rho = &rho + &psi.outer(&psi).scale_real(T::lit(w / total));
    }
    DensityMatrix::new_unchecked(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary_and_seed_stable() {
        let a: Matrix<f64> = haar_unitary(5, &mut seeded_rng(7));
        let b: Matrix<f64> = haar_unitary(5, &mut seeded_rng(7));
        assert!(a.unitarity_residual() < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn random_state_has_unit_trace() {
        let rho: DensityMatrix<f64> = random_density_matrix(3, 4, &mut seeded_rng(1));
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-12);
    }
}
