use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use super::spectrum::SpectralClusters;
use crate::error::Result;
use crate::hilbert::{HilbertSpace, Observable, QuantumState, UnitaryOp};
use crate::numeric::{random_unit_vector_with, random_unitary_with, seeded_rng, ComplexMatrix, ComplexVector};
use crate::scalar::Real;

/// Haar-random unitary that is block diagonal in the clustered eigenspaces of
/// `q`, hence commutes with it.
pub fn random_conserving_unitary<T: Real>(q: &Observable<T>, seed: u64, cluster_tol: T) -> Result<UnitaryOp<T>> {
    let clusters = SpectralClusters::new(q, cluster_tol)?;
    let mut rng = seeded_rng(seed);
    let n = clusters.dim();
    let mut blocks = ComplexMatrix::zeros(n, n);
    for c in clusters.clusters() {
        let w: ComplexMatrix<T> = random_unitary_with(c.multiplicity(), &mut rng);
        let off = c.members.start;
        for i in 0..c.multiplicity() {
            for j in 0..c.multiplicity() {
                blocks[(off + i, off + j)] = w[(i, j)];
            }
        }
    }
    let v = &clusters.eigensystem().eigenvectors;
    let u = v.matmul(&blocks)?.matmul(&v.adjoint())?;
    UnitaryOp::new(q.space().clone(), u)
}

/// Random observable `W·diag(λ)·W†` on one factor of size `dim`, with integer
/// levels drawn from a small range so that degenerate eigenspaces are common.
pub fn random_degenerate_observable<T: Real>(dim: usize, seed: u64) -> Result<Observable<T>> {
    let mut rng = seeded_rng(seed);
    let distinct = rng.random_range(1..=dim.div_ceil(2).max(1) + 1);
    let levels: Vec<T> = (0..dim).map(|_| T::from_usize(rng.random_range(0..distinct)).expect("small level")).collect();
    let w: ComplexMatrix<T> = random_unitary_with(dim, &mut rng);
    let m = w.matmul(&ComplexMatrix::from_real_diagonal(&levels))?.matmul(&w.adjoint())?;
    let n = m.rows();
    let half = T::lit(0.5);
    let sym = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()).scale(half));
    Observable::new(HilbertSpace::single("system", dim)?, sym, "charge")
}

/// The baseline average-only triple on a qubit: `Q = diag(0, 1)`, `U` a
/// phase-dressed `X`, `ψ` an equal-weight superposition with a seeded
/// relative phase.
pub fn average_only_counterexample<T: Real>(seed: u64) -> Result<(Observable<T>, UnitaryOp<T>, QuantumState<T>)> {
    average_only_counterexample_in(1, seed)
}

/// Average-only triple on `2·half_dim` levels.
///
/// `Q = 0·I ⊕ 1·I`, `U = (A ⊕ B)·(X ⊗ I)·(C ⊕ D)` with Haar blocks, and
/// `ψ = (φ₀ ⊕ φ₁)/√2`. `U` exchanges the two eigenspaces wholesale, so every
/// branch leaks completely, while the populations stay at one half each and
/// `⟨Q⟩` does not move.
pub fn average_only_counterexample_in<T: Real>(
    half_dim: usize,
    seed: u64,
) -> Result<(Observable<T>, UnitaryOp<T>, QuantumState<T>)> {
    assert!(half_dim >= 1, "half dimension must be positive");
    let d = half_dim;
    let space = HilbertSpace::single("system", 2 * d)?;
    let mut rng = seeded_rng(seed);
    let dress: Vec<ComplexMatrix<T>> = (0..4).map(|_| random_unitary_with(d, &mut rng)).collect();

    let block_diag = |a: &ComplexMatrix<T>, b: &ComplexMatrix<T>| {
        ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - d, j - d)],
            _ => Complex::zero(),
        })
    };
    let swap = ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| {
        if (i + d) % (2 * d) == j {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::zero()
        }
    });
    let u = block_diag(&dress[0], &dress[1]).matmul(&swap)?.matmul(&block_diag(&dress[2], &dress[3]))?;

    let phi0: ComplexVector<T> = random_unit_vector_with(d, &mut rng);
    let phi1: ComplexVector<T> = random_unit_vector_with(d, &mut rng);
    let s = T::FRAC_1_SQRT_2();
    let amps: Vec<Complex<T>> = phi0.as_slice().iter().chain(phi1.as_slice()).map(|z| z.scale(s)).collect();
    let psi = QuantumState::new(space.clone(), ComplexVector::from_vec(amps)?)?;

    let levels: Vec<T> = (0..2 * d).map(|i| if i < d { T::zero() } else { T::one() }).collect();
    let q = Observable::diagonal(space.clone(), &levels, "charge")?;
    Ok((q, UnitaryOp::new(space, u)?, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conservation::{commutator_defect, conservation_report, Tolerances, Verdict};

    #[test]
    fn identity_observable_gives_unconstrained_haar() {
        let sp = HilbertSpace::single("q", 4).unwrap();
        let q = Observable::diagonal(sp, &[1.0; 4], "x").unwrap();
        let u = random_conserving_unitary(&q, 5, 1e-8).unwrap();
        // one 4x4 block: generically every entry is nonzero
        assert!(u.matrix().as_slice().iter().all(|z| z.norm() > 1e-6));
    }

    #[test]
    fn nondegenerate_observable_gives_diagonal_phases() {
        let sp = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::<f64>::diagonal(sp, &[0.0, 1.0, 2.5], "x").unwrap();
        let u = random_conserving_unitary(&q, 8, 1e-8).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let z = u.matrix()[(i, j)];
                if i == j {
                    assert!((z.norm() - 1.0).abs() < 1e-12);
                } else {
                    assert!(z.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn block_structure_on_partial_degeneracy() {
        let sp = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::<f64>::diagonal(sp, &[0.0, 0.0, 1.0], "x").unwrap();
        let u = random_conserving_unitary(&q, 11, 1e-8).unwrap();
        for k in 0..2 {
            assert!(u.matrix()[(2, k)].norm() < 1e-12);
            assert!(u.matrix()[(k, 2)].norm() < 1e-12);
        }
        assert!(commutator_defect(&q, &u).unwrap() < 1e-12);
    }

    #[test]
    fn counterexample_family() {
        let tols = Tolerances::default();
        let mut previous: Option<ComplexMatrix<f64>> = None;
        for seed in 0..6 {
            let (q, u, psi) = average_only_counterexample::<f64>(seed).unwrap();
            let r = conservation_report(&psi, &q, &u, &tols).unwrap();
            assert!(r.average_defect <= 1e-12);
            assert!(r.max_leakage() >= 0.1);
            assert!(r.commutator_defect >= 0.1);
            assert_eq!(r.verdict, Verdict::AverageOnly);
            if let Some(p) = &previous {
                assert_ne!(p, u.matrix());
            }
            previous = Some(u.matrix().clone());
        }
    }

    #[test]
    fn counterexample_in_higher_dimension() {
        let (q, u, psi) = average_only_counterexample_in::<f64>(3, 21).unwrap();
        let r = conservation_report(&psi, &q, &u, &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::AverageOnly);
        assert!((r.max_leakage() - 1.0).abs() < 1e-12);
    }
}
