use serde::{Deserialize, Serialize};

use super::branches::spectral_branches_with;
use super::spectrum::SpectralClusters;
use super::Tolerances;
use crate::error::Result;
use crate::hilbert::{apply, expectation, Observable, QuantumState, UnitaryOp};
use crate::numeric::ComplexVector;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `[Q, U] = 0`: every branch keeps its eigenvalue.
    Exact,
    /// `⟨Q⟩` unchanged for the tested state although `[Q, U] ≠ 0`.
    AverageOnly,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Exact => "EXACT",
            Verdict::AverageOnly => "AVERAGE_ONLY",
            Verdict::Violated => "VIOLATED",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "EXACT" => Ok(Verdict::Exact),
            "AVERAGE_ONLY" => Ok(Verdict::AverageOnly),
            "VIOLATED" => Ok(Verdict::Violated),
            other => Err(format!("unknown verdict `{other}` (expected EXACT, AVERAGE_ONLY or VIOLATED)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRow<T> {
    /// Eigenvalue of the initial branch.
    pub eigenvalue: T,
    pub weight: T,
    /// Probability that `U` moves the branch out of its eigenspace.
    pub leakage: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport<T> {
    pub commutator_defect: T,
    pub average_defect: T,
    pub branch_rows: Vec<BranchRow<T>>,
    pub verdict: Verdict,
}

impl<T: Real> ConservationReport<T> {
    pub fn max_leakage(&self) -> T {
        self.branch_rows.iter().map(|r| r.leakage).fold(T::zero(), T::max)
    }
}

/// `‖QU − UQ‖_F / ‖Q‖_F`, or 0 when `Q = 0`.
pub fn commutator_defect<T: Real>(q: &Observable<T>, u: &UnitaryOp<T>) -> Result<T> {
    crate::hilbert::UnitaryOp::identity(q.space().clone()).compose(u)?; // same-space check
    let qn = q.matrix().frobenius_norm();
    if qn.is_zero() {
        return Ok(T::zero());
    }
    Ok(q.matrix().commutator(u.matrix())?.frobenius_norm() / qn)
}

pub fn conservation_report<T: Real>(
    psi: &QuantumState<T>,
    q: &Observable<T>,
    u: &UnitaryOp<T>,
    tols: &Tolerances<T>,
) -> Result<ConservationReport<T>> {
    let clusters = SpectralClusters::new(q, tols.cluster)?;
    conservation_report_with(psi, q, u, &clusters, tols)
}

/// Report against a precomputed clustering of `q`.
pub fn conservation_report_with<T: Real>(
    psi: &QuantumState<T>,
    q: &Observable<T>,
    u: &UnitaryOp<T>,
    clusters: &SpectralClusters<T>,
    tols: &Tolerances<T>,
) -> Result<ConservationReport<T>> {
    let commutator_defect = commutator_defect(q, u)?;
    let after = apply(u, psi)?;
    let average_defect = (expectation(&after, q)? - expectation(psi, q)?).abs();

    let decomposition = spectral_branches_with(psi, q, clusters, tols)?;
    let mut branch_rows = Vec::with_capacity(decomposition.branches.len());
    for (c, cluster) in clusters.clusters().iter().enumerate() {
        let Some(branch) = decomposition.branches.iter().find(|b| b.eigenvalue == cluster.value) else {
            continue;
        };
        let moved = u.matrix().mul_vec(branch.state.amplitudes())?;
        let kept = clusters.project(c, &moved).norm_sqr();
        branch_rows.push(BranchRow {
            eigenvalue: branch.eigenvalue,
            weight: branch.weight,
            leakage: clamp_unit(T::one() - kept),
        });
    }

    let range = clusters.spectral_range();
    let avg_scale = if range > T::zero() { range } else { T::one() };
    let verdict = if commutator_defect <= tols.exact {
        Verdict::Exact
    } else if average_defect <= tols.average * avg_scale {
        Verdict::AverageOnly
    } else {
        Verdict::Violated
    };
    Ok(ConservationReport { commutator_defect, average_defect, branch_rows, verdict })
}

/// Worst leakage of `u` over the eigenbasis of the clustered observable.
pub fn max_basis_leakage<T: Real>(clusters: &SpectralClusters<T>, u: &UnitaryOp<T>) -> Result<T> {
    let v = &clusters.eigensystem().eigenvectors;
    let mut worst = T::zero();
    for k in 0..clusters.dim() {
        let basis_state: ComplexVector<T> = v.column(k);
        let moved = u.matrix().mul_vec(&basis_state)?;
        let kept = clusters.project(clusters.cluster_of(k), &moved).norm_sqr();
        worst = worst.max(clamp_unit(T::one() - kept));
    }
    Ok(worst)
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HilbertSpace;
    use crate::numeric::ComplexMatrix;

    fn qubit() -> HilbertSpace {
        HilbertSpace::single("q", 2).unwrap()
    }

    fn x() -> UnitaryOp<f64> {
        UnitaryOp::new(qubit(), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()).unwrap()
    }

    fn projector() -> Observable<f64> {
        Observable::diagonal(qubit(), &[0.0, 1.0], "n").unwrap()
    }

    #[test]
    fn function_of_q_commutes() {
        let u = UnitaryOp::evolution(&projector(), 0.77).unwrap();
        assert_eq!(commutator_defect(&projector(), &u).unwrap(), 0.0);
        assert_eq!(commutator_defect(&projector(), &UnitaryOp::identity(qubit())).unwrap(), 0.0);
    }

    #[test]
    fn projector_against_x() {
        // [Q, X] = [[0,−1],[1,0]], norm √2; ‖Q‖_F = 1
        let d = commutator_defect(&projector(), &x()).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_observable_has_zero_defect() {
        let q = Observable::diagonal(qubit(), &[0.0, 0.0], "n").unwrap();
        assert_eq!(commutator_defect(&q, &x()).unwrap(), 0.0);
    }

    #[test]
    fn x_swaps_branches_but_keeps_the_mean() {
        let psi = QuantumState::normalized(qubit(), ComplexVector::from_real(&[1.0, 1.0]).unwrap()).unwrap();
        let r = conservation_report(&psi, &projector(), &x(), &Tolerances::default()).unwrap();
        assert!(r.average_defect < 1e-15);
        assert_eq!(r.branch_rows.len(), 2);
        for row in &r.branch_rows {
            assert_eq!(row.leakage, 1.0);
        }
        assert_eq!(r.verdict, Verdict::AverageOnly);
    }

    #[test]
    fn evolution_under_q_is_exact() {
        let psi = QuantumState::normalized(qubit(), ComplexVector::from_real(&[0.6, 0.8]).unwrap()).unwrap();
        let u = UnitaryOp::evolution(&projector(), 2.1).unwrap();
        let r = conservation_report(&psi, &projector(), &u, &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Exact);
        assert!(r.max_leakage() < 1e-15);
    }

    #[test]
    fn mean_shift_is_violated() {
        let psi = QuantumState::basis(qubit(), 0).unwrap();
        let r = conservation_report(&psi, &projector(), &x(), &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.branch_rows.len(), 1);
    }

    #[test]
    fn zero_weight_branch_is_omitted() {
        let sp = HilbertSpace::single("q", 3).unwrap();
        let q = Observable::diagonal(sp.clone(), &[0.0, 1.0, 2.0], "n").unwrap();
        let psi = QuantumState::basis(sp.clone(), 2).unwrap();
        let r = conservation_report(&psi, &q, &UnitaryOp::identity(sp), &Tolerances::default()).unwrap();
        assert_eq!(r.branch_rows.len(), 1);
        assert_eq!(r.branch_rows[0].eigenvalue, 2.0);
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [Verdict::Exact, Verdict::AverageOnly, Verdict::Violated] {
            assert_eq!(v.as_str().parse::<Verdict>().unwrap(), v);
        }
        assert!("exact".parse::<Verdict>().is_err());
    }
}
