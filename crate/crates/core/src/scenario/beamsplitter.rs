//! A photon meets a recoiling beamsplitter.
//!
//! Path qubit `{t, r}` ⊗ beamsplitter pointer in a truncated Fock space. The
//! reflected branch displaces the pointer by `−δ`; the transmitted branch
//! leaves it alone. The pointer overlap `⟨α−δ|α⟩` sets how much which-path
//! information the beamsplitter carries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complex_serde;
use crate::conservation::{conservation_report, ConservationReport, Tolerances};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, apply, HilbertSpace, Observable, QuantumState, UnitaryOp};
use crate::numeric::{unitary_from_hamiltonian, ComplexMatrix, ComplexVector};

pub const PATH: &str = "path";
pub const POINTER: &str = "pointer";
/// Path basis index of the transmitted arm.
pub const TRANSMITTED: usize = 0;
/// Path basis index of the reflected arm.
pub const REFLECTED: usize = 1;

/// Largest allowed deviation of a truncated coherent state's norm from 1.
pub const COHERENT_NORM_TOL: f64 = 1e-10;
/// Unitarity required of the truncated interaction.
pub const INTERACTION_UNITARITY_TOL: f64 = 1e-9;
/// Per-branch momentum bookkeeping tolerance.
pub const MOMENTUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterSpec {
    #[serde(with = "complex_serde::scalar")]
    pub coherent_amplitude: Complex64,
    #[serde(with = "complex_serde::scalar")]
    pub momentum_kick: Complex64,
    pub fock_cutoff: usize,
    /// Reflected and transmitted amplitudes `(r, t)`.
    #[serde(with = "complex_serde::pair")]
    pub path_amplitudes: (Complex64, Complex64),
}

/// Smallest cutoff accepted for the given amplitudes: `⌈4(|α|² + |δ|²)⌉ + 20`.
pub fn minimum_cutoff(alpha: Complex64, delta: Complex64) -> usize {
    (4.0 * (alpha.norm_sqr() + delta.norm_sqr())).ceil() as usize + 20
}

impl BeamsplitterSpec {
    /// Balanced splitter, `α` and `δ` given, cutoff at its minimum.
    pub fn balanced(alpha: Complex64, delta: Complex64) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            coherent_amplitude: alpha,
            momentum_kick: delta,
            fock_cutoff: minimum_cutoff(alpha, delta),
            path_amplitudes: (h, h),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (r, t) = self.path_amplitudes;
        let norm = (r.norm_sqr() + t.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                field: "path_amplitudes".into(),
                reason: format!("must be normalized, norm is {norm}"),
            });
        }
        for (name, z) in [("coherent_amplitude", self.coherent_amplitude), ("momentum_kick", self.momentum_kick)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidParameter { field: name.into(), reason: "must be finite".into() });
            }
        }
        let min = minimum_cutoff(self.coherent_amplitude, self.momentum_kick);
        if self.fock_cutoff < min {
            return Err(Error::InvalidParameter {
                field: "fock_cutoff".into(),
                reason: format!("must be at least {min} for these amplitudes"),
            });
        }
        Ok(())
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new([(PATH, 2), (POINTER, self.fock_cutoff)]).expect("valid factors")
    }
}

/// Truncated coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, not renormalized.
///
/// Fails when the truncated norm misses 1 by more than [`COHERENT_NORM_TOL`].
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<ComplexVector<f64>> {
    let mut amps = Vec::with_capacity(cutoff);
    let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff {
        amps.push(term);
        term = term * alpha / ((n + 1) as f64).sqrt();
    }
    let v = ComplexVector::from_vec(amps)?;
    let deviation = (v.norm_sqr() - 1.0).abs();
    if deviation > COHERENT_NORM_TOL {
        return Err(Error::TruncationInadequate(format!(
            "coherent state α = {alpha} loses {deviation:.3e} of its norm below cutoff {cutoff}"
        )));
    }
    Ok(v)
}

/// `⟨α−δ|α⟩` evaluated in the truncated Fock basis.
pub fn coherent_overlap(alpha: Complex64, delta: Complex64, cutoff: usize) -> Result<Complex64> {
    let shifted = coherent_state(alpha - delta, cutoff)?;
    let original = coherent_state(alpha, cutoff)?;
    Ok(shifted.inner(&original))
}

/// Truncated displacement `D(β) = exp(β a† − β* a)`.
pub fn displacement(beta: Complex64, cutoff: usize) -> Result<ComplexMatrix<f64>> {
    let a: ComplexMatrix<f64> = annihilation(cutoff);
    let generator = a.adjoint().scale(beta).try_sub(&a.scale(beta.conj()))?;
    // exp(G) = exp(−i·H) with H = iG Hermitian
    let h = generator.scale(Complex64::new(0.0, 1.0));
    unitary_from_hamiltonian(&h, 1.0)
}

/// Pointer momentum quadrature `(a + a†)/2`; `⟨α|p|α⟩ = Re α`.
pub fn momentum_quadrature(cutoff: usize) -> ComplexMatrix<f64> {
    let a: ComplexMatrix<f64> = annihilation(cutoff);
    a.try_add(&a.adjoint()).expect("same shape").scale_real(0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamsplitterBranchRow {
    pub label: &'static str,
    pub weight: f64,
    pub pointer_momentum_before: f64,
    pub pointer_momentum_after: f64,
    /// Momentum handed to the photon in this branch.
    pub photon_momentum_change: f64,
    /// Pointer shift plus photon change; zero when momentum is booked exactly.
    pub net_momentum_change: f64,
}

#[derive(Debug, Clone)]
pub struct BeamsplitterRun {
    pub final_state: QuantumState<f64>,
    /// `|⟨α−δ|α⟩|` between the two branch pointer states.
    pub visibility: f64,
    pub overlap: Complex64,
    pub interaction_unitarity_defect: f64,
    pub branch_table: Vec<BeamsplitterBranchRow>,
    /// Conservation of the which-path label under the interaction.
    pub path_report: ConservationReport<f64>,
}

impl BeamsplitterRun {
    /// Pointer shifts `(transmitted, reflected)`.
    pub fn per_branch_momentum(&self) -> (f64, f64) {
        let shift = |r: &BeamsplitterBranchRow| r.pointer_momentum_after - r.pointer_momentum_before;
        (shift(&self.branch_table[0]), shift(&self.branch_table[1]))
    }

    pub fn bookkeeping_holds(&self) -> bool {
        self.branch_table.iter().all(|r| r.net_momentum_change.abs() <= MOMENTUM_TOL)
    }
}

/// `|t⟩⟨t| ⊗ I + |r⟩⟨r| ⊗ D(−δ)`
pub fn beamsplitter_interaction(spec: &BeamsplitterSpec) -> Result<UnitaryOp<f64>> {
    let d = displacement(-spec.momentum_kick, spec.fock_cutoff)?;
    let n = spec.fock_cutoff;
    let zero = Complex64::new(0.0, 0.0);
    let m = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (pi, pj) = (i / n, j / n);
        if pi != pj {
            zero
        } else if pi == REFLECTED {
            d[(i % n, j % n)]
        } else if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            zero
        }
    });
    UnitaryOp::with_tolerance(spec.space(), m, INTERACTION_UNITARITY_TOL).map_err(|e| match e {
        Error::NotUnitary(defect) => {
            Error::TruncationInadequate(format!("truncated interaction has unitarity defect {defect:.3e}"))
        }
        other => other,
    })
}

pub fn run_beamsplitter(spec: &BeamsplitterSpec, tols: &Tolerances<f64>) -> Result<BeamsplitterRun> {
    spec.validate()?;
    let n = spec.fock_cutoff;
    let u = beamsplitter_interaction(spec)?;
    let interaction_unitarity_defect = u.matrix().unitarity_defect();

    let pointer = coherent_state(spec.coherent_amplitude, n)?
        .normalized()
        .expect("nonzero coherent state");
    let (r, t) = spec.path_amplitudes;
    let mut path_amps = [Complex64::new(0.0, 0.0); 2];
    path_amps[TRANSMITTED] = t;
    path_amps[REFLECTED] = r;
    let path = QuantumState::new(HilbertSpace::single(PATH, 2)?, ComplexVector::from_vec(path_amps.to_vec())?)?;
    let initial = path.tensor(&QuantumState::new(HilbertSpace::single(POINTER, n)?, pointer.clone())?)?;
    let final_state = apply(&u, &initial)?;

    // branch pointer states, independent of the path weights
    let reflected_pointer = {
        let d = &u.matrix();
        let block = ComplexMatrix::from_fn(n, n, |i, j| d[(REFLECTED * n + i, REFLECTED * n + j)]);
        block.mul_vec(&pointer)?
    };
    let transmitted_pointer = pointer;
    let overlap = reflected_pointer.inner(&transmitted_pointer);
    let visibility = if reflected_pointer == transmitted_pointer {
        1.0
    } else {
        (overlap.norm() / (reflected_pointer.norm() * transmitted_pointer.norm())).min(1.0)
    };

    let p = momentum_quadrature(n);
    let mean_p = |v: &ComplexVector<f64>| -> Result<f64> { Ok(v.inner(&p.mul_vec(v)?).re / v.norm_sqr()) };
    let before = mean_p(&transmitted_pointer)?;
    let kick = spec.momentum_kick.re;
    let mut branch_table = Vec::with_capacity(2);
    for (label, idx, state, photon) in [
        ("t", TRANSMITTED, &transmitted_pointer, 0.0),
        ("r", REFLECTED, &reflected_pointer, kick),
    ] {
        let after = mean_p(state)?;
        branch_table.push(BeamsplitterBranchRow {
            label,
            weight: path_amps[idx].norm_sqr(),
            pointer_momentum_before: before,
            pointer_momentum_after: after,
            photon_momentum_change: photon,
            net_momentum_change: after - before + photon,
        });
    }

    let which_path = Observable::new(
        spec.space(),
        crate::hilbert::embed(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0]), PATH, &spec.space())?,
        "path",
    )?;
    let path_report = conservation_report(&initial, &which_path, &u, tols)?;

    Ok(BeamsplitterRun { final_state, visibility, overlap, interaction_unitarity_defect, branch_table, path_report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conservation::Verdict;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_kick_overlap_is_one() {
        let z = coherent_overlap(c(0.7, -0.2), c(0.0, 0.0), 40).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unit_kick_overlap_magnitude() {
        for alpha in [c(0.0, 0.0), c(1.0, 0.5), c(-0.3, 1.2)] {
            let z = coherent_overlap(alpha, c(1.0, 0.0), minimum_cutoff(alpha, c(1.0, 0.0))).unwrap();
            assert!((z.norm() - (-0.5f64).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn large_kick_is_which_path() {
        let delta = c(6.0, 0.0);
        let z = coherent_overlap(c(0.0, 0.0), delta, minimum_cutoff(c(0.0, 0.0), delta)).unwrap();
        assert!(z.norm() <= 2e-8);
    }

    #[test]
    fn short_cutoff_is_inadequate() {
        assert!(matches!(coherent_state(c(3.0, 0.0), 10), Err(Error::TruncationInadequate(_))));
    }

    #[test]
    fn no_kick_no_entanglement() {
        let spec = BeamsplitterSpec::balanced(c(0.8, 0.1), c(0.0, 0.0));
        let run = run_beamsplitter(&spec, &Tolerances::default()).unwrap();
        assert_eq!(run.visibility, 1.0);
        assert_eq!(run.per_branch_momentum(), (0.0, 0.0));
    }

    #[test]
    fn balanced_unit_kick() {
        let spec = BeamsplitterSpec::balanced(c(0.4, -0.3), c(1.0, 0.0));
        let run = run_beamsplitter(&spec, &Tolerances::default()).unwrap();
        assert!((run.visibility - (-0.5f64).exp()).abs() < 1e-7);
        let (t_shift, r_shift) = run.per_branch_momentum();
        assert_eq!(t_shift, 0.0);
        assert!((r_shift + 1.0).abs() < MOMENTUM_TOL);
        assert!(run.bookkeeping_holds());
        assert!(run.interaction_unitarity_defect <= INTERACTION_UNITARITY_TOL);
        assert_eq!(run.path_report.verdict, Verdict::Exact);
    }

    #[test]
    fn cutoff_floor_is_enforced() {
        let mut spec = BeamsplitterSpec::balanced(c(1.0, 0.0), c(1.0, 0.0));
        spec.fock_cutoff -= 1;
        assert!(matches!(spec.validate(), Err(Error::InvalidParameter { ref field, .. }) if field == "fock_cutoff"));
    }
}
