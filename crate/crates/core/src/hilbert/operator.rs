use num_complex::Complex;

use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::numeric::ComplexMatrix;
use crate::scalar::Real;

/// Lifts `op`, acting on the factor `target_label`, to the whole of `space`.
pub fn embed<T: Real>(op: &ComplexMatrix<T>, target_label: &str, space: &HilbertSpace) -> Result<ComplexMatrix<T>> {
    let dim = space.dim_of(target_label)?;
    let sub = HilbertSpace::single(target_label, dim)?;
    embed_subspace(op, &sub, space)
}

/// Lifts an operator on a contiguous run of factors to `space`.
pub fn embed_subspace<T: Real>(
    op: &ComplexMatrix<T>,
    sub: &HilbertSpace,
    space: &HilbertSpace,
) -> Result<ComplexMatrix<T>> {
    let d = sub.total_dim();
    if !op.is_square() || op.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: op.rows() });
    }
    let (_, left, right) = space.locate(sub)?;
    let mut out = op.clone();
    if left > 1 {
        out = ComplexMatrix::identity(left).kron(&out);
    }
    if right > 1 {
        out = out.kron(&ComplexMatrix::identity(right));
    }
    Ok(out)
}

/// Hermitian operator bound to a space, tagged with its units.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    space: HilbertSpace,
    matrix: ComplexMatrix<T>,
    units: String,
}

impl<T: Real> Observable<T> {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix<T>, units: impl Into<String>) -> Result<Self> {
        check_square(&space, &matrix)?;
        let tol = T::tol(1e-10);
        if !matrix.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                defect: matrix.hermiticity_defect().to_f64().unwrap_or(f64::NAN),
                tol: (tol * matrix.frobenius_norm()).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { space, matrix, units: units.into() })
    }

    /// Diagonal observable with the given real spectrum.
    pub fn diagonal(space: HilbertSpace, values: &[T], units: impl Into<String>) -> Result<Self> {
        Self::new(space, ComplexMatrix::from_real_diagonal(values), units)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    /// This observable lifted to a larger space containing its factors.
    pub fn lift(&self, space: &HilbertSpace) -> Result<Self> {
        let m = embed_subspace(&self.matrix, &self.space, space)?;
        Ok(Self { space: space.clone(), matrix: m, units: self.units.clone() })
    }
}

/// `Q_S ⊗ I + I ⊗ Q_R` on the joint space, symmetrized.
pub fn total_observable<T: Real>(q_s: &Observable<T>, q_r: &Observable<T>, space: &HilbertSpace) -> Result<Observable<T>> {
    if q_s.units != q_r.units {
        return Err(Error::UnitMismatch(q_s.units.clone(), q_r.units.clone()));
    }
    for f in q_s.space.factors() {
        if q_r.space.factors().iter().any(|g| g.label == f.label) {
            return Err(Error::Shape(format!("factor `{}` appears in both observables", f.label)));
        }
    }
    let sum = embed_subspace(&q_s.matrix, &q_s.space, space)?.try_add(&embed_subspace(&q_r.matrix, &q_r.space, space)?)?;
    let half = T::lit(0.5);
    let n = sum.rows();
    let sym = ComplexMatrix::from_fn(n, n, |i, j| (sum[(i, j)] + sum[(j, i)].conj()).scale(half));
    Ok(Observable { space: space.clone(), matrix: sym, units: q_s.units.clone() })
}

/// Unitary operator bound to a space.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp<T> {
    space: HilbertSpace,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> UnitaryOp<T> {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(space, matrix, T::tol(1e-10))
    }

    /// Accepts `‖U†U − I‖_F ≤ tol`.
    pub fn with_tolerance(space: HilbertSpace, matrix: ComplexMatrix<T>, tol: T) -> Result<Self> {
        check_square(&space, &matrix)?;
        let defect = matrix.unitarity_defect();
        if defect > tol {
            return Err(Error::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let n = space.total_dim();
        Self { space, matrix: ComplexMatrix::identity(n) }
    }

    /// `exp(−i·h·t)` for a Hermitian generator.
    pub fn evolution(h: &Observable<T>, t: T) -> Result<Self> {
        let m = crate::numeric::unitary_from_hamiltonian(h.matrix(), t)?;
        Self::new(h.space.clone(), m)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    /// `self · other` (other acts first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same_space(&self.space, &other.space)?;
        Ok(Self { space: self.space.clone(), matrix: self.matrix.matmul(&other.matrix)? })
    }

    /// Heisenberg-picture observable `U†QU`.
    pub fn conjugate(&self, q: &Observable<T>) -> Result<Observable<T>> {
        check_same_space(&self.space, &q.space)?;
        let m = self.matrix.adjoint().matmul(&q.matrix)?.matmul(&self.matrix)?;
        let n = m.rows();
        let half = T::lit(0.5);
        let sym = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()).scale(half));
        Observable::new(q.space.clone(), sym, q.units.clone())
    }
}

pub(crate) fn check_square<T: Real>(space: &HilbertSpace, m: &ComplexMatrix<T>) -> Result<()> {
    let d = space.total_dim();
    if m.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: m.rows() });
    }
    if m.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: m.cols() });
    }
    Ok(())
}

pub(crate) fn check_same_space(a: &HilbertSpace, b: &HilbertSpace) -> Result<()> {
    if a == b {
        Ok(())
    } else if a.total_dim() != b.total_dim() {
        Err(Error::DimensionMismatch { expected: a.total_dim(), actual: b.total_dim() })
    } else {
        Err(Error::Shape(format!("spaces differ: {a} vs {b}")))
    }
}

/// Photon-number style ladder: `diag(0, 1, …, d−1)·scale`.
pub fn number_operator<T: Real>(dim: usize, scale: T) -> ComplexMatrix<T> {
    let values: Vec<T> = (0..dim).map(|k| T::from_usize(k).expect("small integer") * scale).collect();
    ComplexMatrix::from_real_diagonal(&values)
}

/// Truncated annihilation operator on `dim` Fock levels.
pub fn annihilation<T: Real>(dim: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex::new(T::from_usize(j).expect("small integer").sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}
