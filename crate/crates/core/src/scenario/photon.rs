//! Photon counting with a quantized photoelectric detector.
//!
//! Field `|n⟩` (n ≤ n_max) ⊗ apparatus `|k⟩` (k < K). Each absorbed photon
//! promotes one electron, so the ready apparatus `|0⟩` ends in `|n⟩` while the
//! field ends in vacuum. With `e = ħω` the map preserves `n + k` and therefore
//! the total energy, shell by shell.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complex_serde;
use crate::conservation::{conservation_report, spectral_branches, ConservationReport, Tolerances};
use crate::error::{Error, Result};
use crate::hilbert::{apply, expectation, number_operator, total_observable, HilbertSpace, Observable, QuantumState, UnitaryOp};
use crate::numeric::{ComplexMatrix, ComplexVector};

pub const FIELD: &str = "field";
pub const APPARATUS: &str = "apparatus";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonCountingSpec {
    pub photon_cutoff: usize,
    pub mode_energy: f64,
    #[serde(with = "complex_serde::vec")]
    pub field_amplitudes: Vec<Complex64>,
    pub apparatus_levels: usize,
    #[serde(default)]
    pub apparatus_base_energy: f64,
    pub excitation_energy: f64,
}

impl PhotonCountingSpec {
    /// Vacuum plus ten photons in equal superposition, `ħω = 1`, `e = ħω`,
    /// apparatus base energy 2.
    pub fn canonical() -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 11];
        amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[10] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            photon_cutoff: 10,
            mode_energy: 1.0,
            field_amplitudes: amps,
            apparatus_levels: 11,
            apparatus_base_energy: 2.0,
            excitation_energy: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: String| Err(Error::InvalidParameter { field: field.into(), reason });
        if self.photon_cutoff == 0 {
            return bad("photon_cutoff", "must be positive".into());
        }
        if self.field_amplitudes.len() != self.photon_cutoff + 1 {
            return bad(
                "field_amplitudes",
                format!("expected {} amplitudes (0..=photon_cutoff), got {}", self.photon_cutoff + 1, self.field_amplitudes.len()),
            );
        }
        let norm: f64 = self.field_amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return bad("field_amplitudes", format!("must be normalized, norm is {norm}"));
        }
        if !(self.mode_energy.is_finite() && self.mode_energy > 0.0) {
            return bad("mode_energy", "must be positive".into());
        }
        if !(self.excitation_energy.is_finite() && self.excitation_energy > 0.0) {
            return bad("excitation_energy", "must be positive".into());
        }
        if !(self.apparatus_base_energy.is_finite() && self.apparatus_base_energy >= 0.0) {
            return bad("apparatus_base_energy", "must be non-negative".into());
        }
        if self.apparatus_levels == 0 {
            return bad("apparatus_levels", "must be positive".into());
        }
        Ok(())
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new([(FIELD, self.photon_cutoff + 1), (APPARATUS, self.apparatus_levels)]).expect("valid factors")
    }

    pub fn field_energy(&self) -> Result<Observable<f64>> {
        let sp = HilbertSpace::single(FIELD, self.photon_cutoff + 1)?;
        Observable::new(sp, number_operator(self.photon_cutoff + 1, self.mode_energy), "energy")
    }

    /// `E·I + e·k̂`
    pub fn apparatus_energy(&self) -> Result<Observable<f64>> {
        let k = self.apparatus_levels;
        let levels: Vec<f64> = (0..k).map(|j| self.apparatus_base_energy + self.excitation_energy * j as f64).collect();
        Observable::diagonal(HilbertSpace::single(APPARATUS, k)?, &levels, "energy")
    }

    pub fn total_energy(&self) -> Result<Observable<f64>> {
        total_observable(&self.field_energy()?, &self.apparatus_energy()?, &self.space())
    }

    /// Field superposition ⊗ ready apparatus `|0⟩`.
    pub fn initial_state(&self) -> Result<QuantumState<f64>> {
        let field = QuantumState::new(
            HilbertSpace::single(FIELD, self.photon_cutoff + 1)?,
            ComplexVector::from_vec(self.field_amplitudes.clone())?,
        )?;
        let ready = QuantumState::basis(HilbertSpace::single(APPARATUS, self.apparatus_levels)?, 0)?;
        field.tensor(&ready)
    }
}

/// The detector interaction as a permutation of `|n, k⟩`.
///
/// On the ready apparatus it acts as `|n, 0⟩ → |0, n⟩`. Each shell
/// `{(n, k) : n + k = s}` is closed under the map: the remaining shell states
/// are paired in lexicographic order, unmapped sources onto unmapped targets,
/// which cycles the shell by one step.
pub fn build_photon_counter(spec: &PhotonCountingSpec) -> Result<UnitaryOp<f64>> {
    spec.validate()?;
    let nf = spec.photon_cutoff + 1;
    let ka = spec.apparatus_levels;
    let space = spec.space();
    let index = |n: usize, k: usize| n * ka + k;
    let mut image = vec![usize::MAX; nf * ka];

    for s in 0..(nf + ka - 1) {
        let shell: Vec<(usize, usize)> = (0..nf).filter(|&n| n <= s && s - n < ka).map(|n| (n, s - n)).collect();
        let mut sources = shell.clone();
        let mut targets = shell.clone();
        if s < nf {
            if s >= ka {
                return Err(Error::OverflowUnrepresentable(format!(
                    "{s} photons need apparatus level {s}, but only {ka} levels exist"
                )));
            }
            image[index(s, 0)] = index(0, s);
            sources.retain(|&p| p != (s, 0));
            targets.retain(|&p| p != (0, s));
        }
        for (src, dst) in sources.into_iter().zip(targets) {
            image[index(src.0, src.1)] = index(dst.0, dst.1);
        }
    }
    debug_assert!(image.iter().all(|&i| i != usize::MAX));

    let dim = nf * ka;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (src, &dst) in image.iter().enumerate() {
        m[(dst, src)] = Complex64::new(1.0, 0.0);
    }
    UnitaryOp::with_tolerance(space, m, 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonBranchRow {
    /// Total energy of the branch.
    pub energy: f64,
    pub weight: f64,
    pub leakage: f64,
    /// Probability that the field is in vacuum within the final branch.
    pub field_vacuum_probability: f64,
    /// Mean apparatus excitation number within the final branch.
    pub apparatus_excitations: f64,
}

#[derive(Debug, Clone)]
pub struct PhotonCountingRun {
    pub report: ConservationReport<f64>,
    pub initial_state: QuantumState<f64>,
    pub final_state: QuantumState<f64>,
    pub energy_before: f64,
    pub energy_after: f64,
    pub branch_table: Vec<PhotonBranchRow>,
}

pub fn run_photon_counting(spec: &PhotonCountingSpec, tols: &Tolerances<f64>) -> Result<PhotonCountingRun> {
    let u = build_photon_counter(spec)?;
    let q = spec.total_energy()?;
    let psi = spec.initial_state()?;
    let report = conservation_report(&psi, &q, &u, tols)?;
    let final_state = apply(&u, &psi)?;

    let space = spec.space();
    let vacuum_projector = Observable::new(
        space.clone(),
        crate::hilbert::embed(&ComplexMatrix::from_real_diagonal(&vacuum_indicator(spec.photon_cutoff + 1)), FIELD, &space)?,
        "probability",
    )?;
    let excitations = Observable::new(
        space.clone(),
        crate::hilbert::embed(&number_operator(spec.apparatus_levels, 1.0), APPARATUS, &space)?,
        "count",
    )?;

    let final_branches = spectral_branches(&final_state, &q, tols.cluster)?;
    let mut branch_table = Vec::new();
    for b in &final_branches.branches {
        let leakage = report
            .branch_rows
            .iter()
            .find(|r| r.eigenvalue == b.eigenvalue)
            .map_or(f64::NAN, |r| r.leakage);
        branch_table.push(PhotonBranchRow {
            energy: b.eigenvalue,
            weight: b.weight,
            leakage,
            field_vacuum_probability: expectation(&b.state, &vacuum_projector)?,
            apparatus_excitations: expectation(&b.state, &excitations)?,
        });
    }

    Ok(PhotonCountingRun {
        energy_before: expectation(&psi, &q)?,
        energy_after: expectation(&final_state, &q)?,
        report,
        initial_state: psi,
        final_state,
        branch_table,
    })
}

fn vacuum_indicator(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
}

/// `(|0⟩|k=0⟩ + |0⟩|k=10⟩)/√2` on the canonical space.
pub fn canonical_target(spec: &PhotonCountingSpec) -> Result<QuantumState<f64>> {
    let space = spec.space();
    let mut amps = vec![Complex64::new(0.0, 0.0); space.total_dim()];
    amps[space.index_of(&[0, 0])?] = Complex64::new(1.0, 0.0);
    amps[space.index_of(&[0, 10])?] = Complex64::new(1.0, 0.0);
    QuantumState::normalized(space, ComplexVector::from_vec(amps)?)
}
