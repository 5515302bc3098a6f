use super::spectrum::SpectralClusters;
use super::Tolerances;
use crate::error::Result;
use crate::hilbert::{Observable, QuantumState};
use crate::numeric::ComplexVector;
use crate::scalar::Real;

/// One term of a state in the eigenbasis where `Q` is sharp.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub eigenvalue: T,
    pub multiplicity: usize,
    /// Normalized `P_q|ψ⟩`.
    pub state: QuantumState<T>,
    /// `‖P_q|ψ⟩‖²`
    pub weight: T,
}

#[derive(Debug, Clone)]
pub struct BranchDecomposition<T> {
    pub observable: Observable<T>,
    pub branches: Vec<Branch<T>>,
    /// Total weight of branches below the floor.
    pub discarded_mass: T,
    /// Set when the whole spectrum of `Q` collapsed into one cluster, which
    /// makes the decomposition trivial.
    pub degenerate_spectrum: bool,
}

impl<T: Real> BranchDecomposition<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.branches.iter().map(|b| b.eigenvalue).collect()
    }

    pub fn weights(&self) -> Vec<T> {
        self.branches.iter().map(|b| b.weight).collect()
    }

    /// `Σ √w·b`, equal to the decomposed state up to discarded mass.
    pub fn reassemble(&self) -> ComplexVector<T> {
        let dim = self.observable.space().total_dim();
        self.branches.iter().fold(ComplexVector::zeros(dim), |acc, b| {
            acc.add(&b.state.amplitudes().scale_real(b.weight.sqrt()))
        })
    }
}

/// Decomposes `psi` into branches of `q` with the default weight floor.
pub fn spectral_branches<T: Real>(psi: &QuantumState<T>, q: &Observable<T>, cluster_tol: T) -> Result<BranchDecomposition<T>> {
    let tols = Tolerances { cluster: cluster_tol, ..Tolerances::default() };
    let clusters = SpectralClusters::new(q, tols.cluster)?;
    spectral_branches_with(psi, q, &clusters, &tols)
}

/// Decomposition against precomputed clusters.
pub fn spectral_branches_with<T: Real>(
    psi: &QuantumState<T>,
    q: &Observable<T>,
    clusters: &SpectralClusters<T>,
    tols: &Tolerances<T>,
) -> Result<BranchDecomposition<T>> {
    crate::hilbert::expectation(psi, q)?; // same-space check
    let mut branches = Vec::new();
    let mut discarded = T::zero();
    for (c, cluster) in clusters.clusters().iter().enumerate() {
        let projected = clusters.project(c, psi.amplitudes());
        let weight = projected.norm_sqr();
        if weight <= tols.weight_floor {
            discarded += weight;
            continue;
        }
        let state = QuantumState::normalized(psi.space().clone(), projected)?;
        branches.push(Branch { eigenvalue: cluster.value, multiplicity: cluster.multiplicity(), state, weight });
    }
    Ok(BranchDecomposition {
        observable: q.clone(),
        branches,
        discarded_mass: discarded,
        degenerate_spectrum: clusters.clusters().len() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HilbertSpace;

    fn state(space: &HilbertSpace, amps: &[f64]) -> QuantumState<f64> {
        QuantumState::normalized(space.clone(), ComplexVector::from_real(amps).unwrap()).unwrap()
    }

    #[test]
    fn vacuum_and_ten_photons() {
        let field = HilbertSpace::single("field", 11).unwrap();
        let mut amps = vec![0.0; 11];
        amps[0] = 1.0;
        amps[10] = 1.0;
        let n: Vec<f64> = (0..11).map(f64::from).collect();
        let q = Observable::diagonal(field.clone(), &n, "photons").unwrap();
        let d = spectral_branches(&state(&field, &amps), &q, 1e-8).unwrap();
        assert_eq!(d.eigenvalues(), vec![0.0, 10.0]);
        for w in d.weights() {
            assert!((w - 0.5).abs() < 1e-15);
        }
        assert!(!d.degenerate_spectrum);
    }

    #[test]
    fn eigenstate_is_one_branch() {
        let sp = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::diagonal(sp.clone(), &[0.0, 1.0, 2.0], "x").unwrap();
        let d = spectral_branches(&state(&sp, &[0.0, 1.0, 0.0]), &q, 1e-8).unwrap();
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].weight, 1.0);
        assert_eq!(d.branches[0].eigenvalue, 1.0);
    }

    #[test]
    fn degenerate_level_keeps_coherent_branch() {
        // P_1 = diag(0,1,1): P_1ψ = (0,1,1)/√3, weight 2/3, normalized (0,1,1)/√2
        let sp = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::diagonal(sp.clone(), &[0.0, 1.0, 1.0], "x").unwrap();
        let d = spectral_branches(&state(&sp, &[1.0, 1.0, 1.0]), &q, 1e-8).unwrap();
        assert_eq!(d.eigenvalues(), vec![0.0, 1.0]);
        assert!((d.branches[0].weight - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.branches[1].weight - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.branches[1].multiplicity, 2);
        let b = d.branches[1].state.amplitudes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(b[0].norm() < 1e-15);
        assert!((b[1].re - s).abs() < 1e-15 && (b[2].re - s).abs() < 1e-15);
    }

    #[test]
    fn flags_trivial_decomposition() {
        let sp = HilbertSpace::single("q", 2).unwrap();
        let q = Observable::diagonal(sp.clone(), &[1.0, 1.0], "x").unwrap();
        let d = spectral_branches(&state(&sp, &[1.0, 1.0]), &q, 1e-8).unwrap();
        assert!(d.degenerate_spectrum);
        assert_eq!(d.branches.len(), 1);
    }

    #[test]
    fn rejects_foreign_state() {
        let sp = HilbertSpace::single("q", 2).unwrap();
        let other = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::diagonal(sp, &[0.0, 1.0], "x").unwrap();
        assert!(spectral_branches(&state(&other, &[1.0, 0.0, 0.0]), &q, 1e-8).is_err());
    }
}
