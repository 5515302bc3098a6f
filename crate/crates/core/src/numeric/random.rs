//! Seeded Haar-random unitaries.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use crate::scalar::Real;

/// The generator every seeded routine in this crate draws from.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts each N(0, 1/2).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re * std::f64::consts::FRAC_1_SQRT_2), T::lit(im * std::f64::consts::FRAC_1_SQRT_2))
}

/// Haar unitary from Gram–Schmidt on a complex Gaussian matrix.
///
/// Gram–Schmidt produces the QR factor with positive real diagonal in `R`,
/// which is what makes the result Haar distributed.
pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    assert!(dim >= 1, "unitary dimension must be positive");
    let mut cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect())
        .collect();
    for j in 0..dim {
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex<T> =
                    cols[k].iter().zip(&cols[j]).map(|(a, &b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, &q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        debug_assert!(!norm.is_zero(), "degenerate Gaussian draw");
        for x in cols[j].iter_mut() {
            *x = x.unscale(norm);
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Haar unitary of size `dim`, deterministic in `seed`.
pub fn random_unitary<T: Real>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    random_unitary_with(dim, &mut seeded_rng(seed))
}

/// Random Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
pub fn random_hermitian_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let half = T::lit(0.5);
    ComplexMatrix::from_fn(dim, dim, |i, j| (g[(i, j)] + g[(j, i)].conj()).scale(half))
}

/// Random unit vector, uniformly distributed on the complex sphere.
pub fn random_unit_vector_with<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> super::vector::ComplexVector<T> {
    loop {
        let v = super::vector::ComplexVector::from_vec((0..dim).map(|_| complex_gaussian(rng)).collect())
            .expect("finite draws");
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}
