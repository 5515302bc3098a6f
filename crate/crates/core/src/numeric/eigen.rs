//! Hermitian eigensystems by cyclic complex Jacobi rotations, and functions of
//! Hermitian matrices built on them.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigensystem<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> Eigensystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(f(λ))·V†`
    pub fn map_spectrum(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = self.dim();
        let fl: Vec<Complex<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_spectrum(|l| Complex::new(l, T::zero()))
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Hermiticity is checked as `‖h − h†‖_F ≤ tol·‖h‖_F`; the Hermitian part is
/// what gets diagonalized.
pub fn hermitian_eigensystem<T: Real>(h: &ComplexMatrix<T>, tol: T) -> Result<Eigensystem<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: h.cols() });
    }
    let defect = h.hermiticity_defect();
    let scale = h.frobenius_norm();
    if defect > tol * scale {
        return Err(Error::NotHermitian {
            defect: defect.to_f64().unwrap_or(f64::NAN),
            tol: (tol * scale).to_f64().unwrap_or(f64::NAN),
        });
    }

    let n = h.rows();
    let half = T::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()).scale(half));
    let mut v = ComplexMatrix::identity(n);

    let target = T::epsilon() * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || off.is_zero() {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off_norm: off.to_f64().unwrap_or(f64::NAN),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Eigensystem { eigenvalues, eigenvectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`; `a ← G†aG`, `v ← vG`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let b = a[(p, q)];
    let b_abs = b.norm();
    if b_abs.is_zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase e^{iφ} of the off-diagonal entry
    let phase = b.unscale(b_abs);
    let tau = (aqq - app) / (T::lit(2.0) * b_abs);
    let t = if tau >= T::zero() {
        (tau + (T::one() + tau * tau).sqrt()).recip()
    } else {
        -(-tau + (T::one() + tau * tau).sqrt()).recip()
    };
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let gpp = Complex::new(c, T::zero());
    let gpq = Complex::new(s, T::zero());
    let gqp = phase.conj().scale(-s);
    let gqq = phase.conj().scale(c);

    let n = a.rows();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * gpp + aiq * gqp;
        a[(i, q)] = aip * gpq + aiq * gqq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * gpp + viq * gqp;
        v[(i, q)] = vip * gpq + viq * gqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = gpp.conj() * apj + gqp.conj() * aqj;
        a[(q, j)] = gpq.conj() * apj + gqq.conj() * aqj;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}

/// `exp(−i·h·t)` through the eigendecomposition of `h`.
pub fn unitary_from_hamiltonian<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigensystem(h, T::tol(1e-10))?;
    Ok(eig.map_spectrum(|l| Complex::from_polar(T::one(), -l * t)))
}
