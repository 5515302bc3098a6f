//! Branch structure of a superposed source mass, its field, and a test mass.
//!
//! Kinematic only: the field and acceleration registers carry orthogonal
//! labels, no field values are computed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complex_serde;
use crate::conservation::{spectral_branches, BranchDecomposition};
use crate::error::{Error, Result};
use crate::hilbert::{apply, HilbertSpace, Observable, QuantumState, UnitaryOp};
use crate::numeric::{ComplexMatrix, ComplexVector};

pub const MASS: &str = "mass";
pub const FIELD: &str = "field";
pub const TEST: &str = "test";

/// Amplitude below which a mixed triple counts as absent.
pub const CROSS_BRANCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSpec {
    /// Amplitudes `(c₁, c₂)` of the mass at `r₁` and `r₂`.
    #[serde(with = "complex_serde::pair")]
    pub position_amplitudes: (Complex64, Complex64),
}

impl EquivalenceSpec {
    pub fn balanced() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { position_amplitudes: (h, h) }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.position_amplitudes;
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                field: "position_amplitudes".into(),
                reason: format!("must be normalized, norm is {norm}"),
            });
        }
        Ok(())
    }

    pub fn space() -> HilbertSpace {
        HilbertSpace::new([(MASS, 2), (FIELD, 3), (TEST, 3)]).expect("valid factors")
    }

    /// `(c₁|r₁⟩ + c₂|r₂⟩)|g₀⟩|a₀⟩`
    pub fn initial_state(&self) -> Result<QuantumState<f64>> {
        let sp = Self::space();
        let mut amps = vec![Complex64::new(0.0, 0.0); sp.total_dim()];
        amps[sp.index_of(&[0, 0, 0])?] = self.position_amplitudes.0;
        amps[sp.index_of(&[1, 0, 0])?] = self.position_amplitudes.1;
        QuantumState::new(sp, ComplexVector::from_vec(amps)?)
    }

    /// `c₁|r₁⟩|g₁⟩|a₁⟩ + c₂|r₂⟩|g₂⟩|a₂⟩`
    pub fn branched_state(&self) -> Result<QuantumState<f64>> {
        let sp = Self::space();
        let mut amps = vec![Complex64::new(0.0, 0.0); sp.total_dim()];
        amps[sp.index_of(&[0, 1, 1])?] = self.position_amplitudes.0;
        amps[sp.index_of(&[1, 2, 2])?] = self.position_amplitudes.1;
        QuantumState::new(sp, ComplexVector::from_vec(amps)?)
    }
}

/// Permutation of the product basis given by a digit map.
fn permutation(space: &HilbertSpace, map: impl Fn(&[usize]) -> Vec<usize>) -> Result<UnitaryOp<f64>> {
    let d = space.total_dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for src in 0..d {
        let dst = space.index_of(&map(&space.digits_of(src)))?;
        m[(dst, src)] = Complex64::new(1.0, 0.0);
    }
    UnitaryOp::new(space.clone(), m)
}

fn swap_with_zero(level: usize, target: usize) -> usize {
    match level {
        0 => target,
        l if l == target => 0,
        l => l,
    }
}

/// Mass position `rᵢ` sources field `gᵢ` (swap `g₀ ↔ gᵢ`), then field `g_j`
/// accelerates the test mass into `a_j` (swap `a₀ ↔ a_j`).
pub fn equivalence_interaction() -> Result<UnitaryOp<f64>> {
    let sp = EquivalenceSpec::space();
    let source = permutation(&sp, |d| vec![d[0], swap_with_zero(d[1], d[0] + 1), d[2]])?;
    let respond = permutation(&sp, |d| {
        let a = if d[1] == 0 { d[2] } else { swap_with_zero(d[2], d[1]) };
        vec![d[0], d[1], a]
    })?;
    respond.compose(&source)
}

/// Mass position observable with eigenvalues 1 at `r₁` and 2 at `r₂`.
pub fn mass_position() -> Result<Observable<f64>> {
    let sp = EquivalenceSpec::space();
    let m = crate::hilbert::embed(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0]), MASS, &sp)?;
    Observable::new(sp, m, "position")
}

#[derive(Debug, Clone)]
pub struct EquivalenceRun {
    pub final_state: QuantumState<f64>,
    /// No amplitude on mixed triples `(rᵢ, g_j, a_k)` with `i+1 ≠ j` or `j ≠ k`.
    pub branch_correlation_check: bool,
    pub max_cross_branch_amplitude: f64,
    pub mass_branches: BranchDecomposition<f64>,
}

pub fn run_equivalence(spec: &EquivalenceSpec) -> Result<EquivalenceRun> {
    spec.validate()?;
    let u = equivalence_interaction()?;
    let final_state = apply(&u, &spec.initial_state()?)?;
    let sp = EquivalenceSpec::space();
    let mut max_cross = 0.0f64;
    for idx in 0..sp.total_dim() {
        let d = sp.digits_of(idx);
        let aligned = d[1] == d[0] + 1 && d[2] == d[1];
        if !aligned {
            max_cross = max_cross.max(final_state.amplitudes()[idx].norm());
        }
    }
    let mass_branches = spectral_branches(&final_state, &mass_position()?, 1e-8)?;
    Ok(EquivalenceRun {
        final_state,
        branch_correlation_check: max_cross <= CROSS_BRANCH_TOL,
        max_cross_branch_amplitude: max_cross,
        mass_branches,
    })
}
