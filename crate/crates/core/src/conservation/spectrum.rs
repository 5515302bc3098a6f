use std::ops::Range;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Result;
use crate::hilbert::Observable;
use crate::numeric::{hermitian_eigensystem, ComplexMatrix, ComplexVector, Eigensystem};
use crate::scalar::Real;

/// A run of (numerically) equal eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    /// Mean of the member eigenvalues.
    pub value: T,
    /// Column range in the eigenvector matrix.
    pub members: Range<usize>,
}

impl<T> Cluster<T> {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Eigenbasis of an observable grouped into eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectralClusters<T> {
    eigen: Eigensystem<T>,
    clusters: Vec<Cluster<T>>,
}

impl<T: Real> SpectralClusters<T> {
    /// Single-linkage clustering of the sorted spectrum: neighbours join a
    /// cluster when their gap is at most `cluster_tol·(λ_max − λ_min)`, or
    /// below the eigensolver's roundoff floor `1000·ε·‖λ‖₂`.
    pub fn new(q: &Observable<T>, cluster_tol: T) -> Result<Self> {
        let eigen = hermitian_eigensystem(q.matrix(), T::tol(1e-10))?;
        Ok(Self::from_eigensystem(eigen, cluster_tol))
    }

    pub fn from_eigensystem(eigen: Eigensystem<T>, cluster_tol: T) -> Self {
        let values = &eigen.eigenvalues;
        let n = values.len();
        let range = values[n - 1] - values[0];
        let spectral_norm = values.iter().map(|&l| l * l).sum::<T>().sqrt();
        let gap_limit = (cluster_tol * range).max(T::epsilon() * T::lit(1e3) * spectral_norm);
        let mut clusters = Vec::new();
        let mut start = 0;
        for k in 1..=n {
            if k == n || values[k] - values[k - 1] > gap_limit {
                let mean = values[start..k].iter().copied().sum::<T>() / T::from_usize(k - start).expect("count");
                clusters.push(Cluster { value: mean, members: start..k });
                start = k;
            }
        }
        Self { eigen, clusters }
    }

    pub fn clusters(&self) -> &[Cluster<T>] {
        &self.clusters
    }

    pub fn eigensystem(&self) -> &Eigensystem<T> {
        &self.eigen
    }

    pub fn spectral_range(&self) -> T {
        let v = &self.eigen.eigenvalues;
        v[v.len() - 1] - v[0]
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Index of the cluster containing eigenvector column `k`.
    pub fn cluster_of(&self, k: usize) -> usize {
        self.clusters.iter().position(|c| c.members.contains(&k)).expect("column in range")
    }

    /// `P_c·ψ` for the eigenspace projector of cluster `c`.
    pub fn project(&self, c: usize, psi: &ComplexVector<T>) -> ComplexVector<T> {
        let v = &self.eigen.eigenvectors;
        let n = self.dim();
        let mut out = vec![Complex::zero(); n];
        for k in self.clusters[c].members.clone() {
            let coef: Complex<T> = (0..n).map(|i| v[(i, k)].conj() * psi[i]).sum();
            for (i, o) in out.iter_mut().enumerate() {
                *o += v[(i, k)] * coef;
            }
        }
        ComplexVector::from_vec(out).expect("finite projection")
    }

    pub fn projector(&self, c: usize) -> ComplexMatrix<T> {
        let v = &self.eigen.eigenvectors;
        let n = self.dim();
        let members = self.clusters[c].members.clone();
        ComplexMatrix::from_fn(n, n, |i, j| members.clone().map(|k| v[(i, k)] * v[(j, k)].conj()).sum())
    }

    /// `V†·M·V`, i.e. `M` written in the clustered eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let v = &self.eigen.eigenvectors;
        v.adjoint().matmul(m).and_then(|x| x.matmul(v)).expect("square operands of equal size")
    }

    /// Largest Frobenius norm over the off-diagonal blocks of `V†MV`.
    pub fn max_inter_block_norm(&self, m: &ComplexMatrix<T>) -> T {
        let w = self.to_eigenbasis(m);
        let mut worst = T::zero();
        for (a, ca) in self.clusters.iter().enumerate() {
            for (b, cb) in self.clusters.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mut acc = T::zero();
                for i in ca.members.clone() {
                    for j in cb.members.clone() {
                        acc += w[(i, j)].norm_sqr();
                    }
                }
                worst = worst.max(acc.sqrt());
            }
        }
        worst
    }
}
