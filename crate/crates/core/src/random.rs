//! Seeded random operators and states.
//!
//! All generators draw from a ChaCha8 stream selected by `(seed, stream)` so
//! item `k` of an ensemble does not depend on how many items precede it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CVector, ComplexMatrix, StateVector};

pub type ModelRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> ModelRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `(G + G†)/2` with i.i.d. standard complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    ComplexMatrix::from_nalgebra((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Haar-distributed pure state.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return StateVector::from_vector_unchecked(v / Complex64::new(norm, 0.0));
        }
    }
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(q)
}

/// `V diag(values) V†` for a Haar-random `V`.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> ComplexMatrix {
    let v = haar_unitary(values.len(), rng);
    &(&v * &ComplexMatrix::diag(values)) * &v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = random_hermitian(3, &mut rng_for(7, 2));
        let b = random_hermitian(3, &mut rng_for(7, 2));
        let c = random_hermitian(3, &mut rng_for(7, 3));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = rng_for(1, 0);
        for dim in 1..6 {
            assert!(random_hermitian(dim, &mut rng).hermiticity_residual() < 1e-14);
            assert!(haar_unitary(dim, &mut rng).unitarity_residual() < 1e-12);
            let psi = haar_state(dim, &mut rng);
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
        }
    }
}
