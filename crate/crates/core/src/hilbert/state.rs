use num_complex::Complex;

use super::operator::{check_same_space, Observable, UnitaryOp};
use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::numeric::ComplexVector;
use crate::scalar::Real;

const NORM_TOL: f64 = 1e-10;
const RENORMALIZE_ABOVE: f64 = 1e-12;
const DRIFT_LIMIT: f64 = 1e-8;

/// Normalized pure state on a labeled space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    space: HilbertSpace,
    amplitudes: ComplexVector<T>,
}

impl<T: Real> QuantumState<T> {
    /// Requires `|‖ψ‖ − 1| ≤ 1e-10`.
    pub fn new(space: HilbertSpace, amplitudes: ComplexVector<T>) -> Result<Self> {
        if amplitudes.dim() != space.total_dim() {
            return Err(Error::DimensionMismatch { expected: space.total_dim(), actual: amplitudes.dim() });
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > T::tol(NORM_TOL) {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(space: HilbertSpace, amplitudes: ComplexVector<T>) -> Result<Self> {
        let unit = amplitudes.normalized().ok_or(Error::NotNormalized(0.0))?;
        Self::new(space, unit)
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        let d = space.total_dim();
        if index >= d {
            return Err(Error::DimensionMismatch { expected: d, actual: index });
        }
        Ok(Self { space, amplitudes: ComplexVector::basis(d, index) })
    }

    /// Product basis state given one digit per factor.
    pub fn product_basis(space: HilbertSpace, digits: &[usize]) -> Result<Self> {
        let idx = space.index_of(digits)?;
        Self::basis(space, idx)
    }

    /// Tensor product; factor lists are concatenated in order.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let factors = self
            .space
            .factors()
            .iter()
            .chain(other.space.factors())
            .map(|f| (f.label.clone(), f.dim));
        let space = HilbertSpace::new(factors)?;
        Ok(Self { space, amplitudes: self.amplitudes.kron(&other.amplitudes) })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &ComplexVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex<T>> {
        Ok(self.amplitudes[self.space.index_of(digits)?])
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_same_space(&self.space, &other.space)?;
        Ok(self.amplitudes.inner(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// `U|ψ⟩`. Norm drift above 1e-12 is renormalized away; above 1e-8 it is an error.
pub fn apply<T: Real>(u: &UnitaryOp<T>, psi: &QuantumState<T>) -> Result<QuantumState<T>> {
    check_same_space(u.space(), psi.space())?;
    let out = u.matrix().mul_vec(&psi.amplitudes)?;
    let drift = (out.norm() - T::one()).abs();
    if drift > T::tol(DRIFT_LIMIT) {
        return Err(Error::NormDrift(drift.to_f64().unwrap_or(f64::NAN)));
    }
    let amplitudes = if drift > T::tol(RENORMALIZE_ABOVE) {
        out.normalized().expect("nonzero after unitary")
    } else {
        out
    };
    Ok(QuantumState { space: psi.space.clone(), amplitudes })
}

/// `⟨ψ|Q|ψ⟩`, which must be real to `1e-10·max(1, ‖Q‖_F)`.
pub fn expectation<T: Real>(psi: &QuantumState<T>, q: &Observable<T>) -> Result<T> {
    check_same_space(psi.space(), q.space())?;
    let qpsi = q.matrix().mul_vec(&psi.amplitudes)?;
    let value = psi.amplitudes.inner(&qpsi);
    let scale = q.matrix().frobenius_norm().max(T::one());
    if value.im.abs() > T::tol(1e-10) * scale {
        return Err(Error::NonRealExpectation(value.im.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(value.re)
}
