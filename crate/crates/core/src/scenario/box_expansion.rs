//! Sudden expansion of an infinite square well.
//!
//! Units: ħ = 1 and 2m = 1, so the level energies are `E_n = (nπ/L)²`. The
//! well `[0, L]` is widened to `[0, L']` instantly; the old eigenstate is
//! re-expanded in the new eigenbasis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail mass above which a truncated basis is rejected.
pub const TAIL_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxExpansionSpec {
    pub box_length: f64,
    pub quantum_number: u32,
    pub epsilon: f64,
    #[serde(default = "default_truncation")]
    pub basis_truncation: usize,
}

fn default_truncation() -> usize {
    2000
}

impl BoxExpansionSpec {
    pub fn new(box_length: f64, quantum_number: u32, epsilon: f64, basis_truncation: usize) -> Result<Self> {
        let spec = Self { box_length, quantum_number, epsilon, basis_truncation };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: &str| {
            Err(Error::InvalidParameter { field: field.into(), reason: reason.into() })
        };
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return bad("box_length", "must be a positive finite length");
        }
        if self.quantum_number == 0 {
            return bad("quantum_number", "must be at least 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon", "must lie strictly between 0 and 1");
        }
        if self.basis_truncation < 10 * self.quantum_number as usize {
            return bad("basis_truncation", "must be at least 10 × quantum_number");
        }
        Ok(())
    }

    /// Wavelength of the initial state, `2L/n`.
    pub fn wavelength(&self) -> f64 {
        2.0 * self.box_length / f64::from(self.quantum_number)
    }

    /// `δL = (λ/2)(1 − ε)`
    pub fn expansion(&self) -> f64 {
        0.5 * self.wavelength() * (1.0 - self.epsilon)
    }

    pub fn expanded_length(&self) -> f64 {
        self.box_length + self.expansion()
    }
}

/// `E_n = (nπ/L)²`
pub fn level_energy(n: u32, length: f64) -> f64 {
    let k = f64::from(n) * PI / length;
    k * k
}

/// Overlap `⟨φ'_m|φ_n⟩` of the old level `n` in a well of width `length`
/// with the new level `m` in a well of width `expanded`.
pub fn box_overlap(n: u32, length: f64, m: u32, expanded: f64) -> Result<f64> {
    if !(length > 0.0 && expanded.is_finite()) || expanded < length {
        return Err(Error::InvalidGeometry(format!(
            "expanded length {expanded} must be at least the original length {length} > 0"
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter { field: "quantum_number".into(), reason: "levels start at 1".into() });
    }
    if expanded == length {
        return Ok(if n == m { 1.0 } else { 0.0 });
    }
    let k1 = f64::from(n) * PI / length;
    let k2 = f64::from(m) * PI / expanded;
    let norm = (length * expanded).sqrt().recip();
    let x = (k1 - k2) * length;
    if x.abs() > 0.1 {
        // sin((k1 ∓ k2)L) = ∓(−1)^n sin(k2 L) since k1 L = nπ
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        Ok(sign * norm * 2.0 * k1 * (k2 * length).sin() / ((k1 - k2) * (k1 + k2)))
    } else {
        Ok(norm * (length * sinc(x) - ((k1 + k2) * length).sin() / (k1 + k2)))
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxExpansionRun {
    pub expanded_length: f64,
    /// `p_m` for `m = 1..=M`, index `m − 1`.
    pub probabilities: Vec<f64>,
    pub most_probable_m: u32,
    /// Another level shares the maximal probability to 1e-12 relative.
    pub argmax_tie: bool,
    pub mean_energy_before: f64,
    pub mean_energy_after: f64,
    pub tail_mass: f64,
    /// `|2L'/(n+1) − λ(1 − ε/(n+1))|`, when `L'` came from the `δL` form.
    pub wavelength_residual: Option<f64>,
}

impl BoxExpansionRun {
    pub fn probability(&self, m: u32) -> f64 {
        self.probabilities[m as usize - 1]
    }

    /// Relative deviation of the post-expansion mean energy from the initial one.
    pub fn energy_relative_error(&self) -> f64 {
        (self.mean_energy_after - self.mean_energy_before).abs() / self.mean_energy_before
    }
}

pub fn run_box_expansion(spec: &BoxExpansionSpec) -> Result<BoxExpansionRun> {
    spec.validate()?;
    let mut run = run_box_expansion_to(spec.quantum_number, spec.box_length, spec.expanded_length(), spec.basis_truncation)?;
    let n1 = f64::from(spec.quantum_number + 1);
    let lhs = 2.0 * run.expanded_length / n1;
    let rhs = spec.wavelength() * (1.0 - spec.epsilon / n1);
    run.wavelength_residual = Some((lhs - rhs).abs());
    Ok(run)
}

/// Expansion to an arbitrary `expanded ≥ length`, bypassing the `δL` form.
pub fn run_box_expansion_to(n: u32, length: f64, expanded: f64, truncation: usize) -> Result<BoxExpansionRun> {
    let m_max = u32::try_from(truncation).map_err(|_| Error::InvalidParameter {
        field: "basis_truncation".into(),
        reason: "too large".into(),
    })?;
    let probabilities = (1..=m_max)
        .map(|m| box_overlap(n, length, m, expanded).map(|c| c * c))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = probabilities.iter().sum();
    let tail_mass = 1.0 - total;
    if tail_mass > TAIL_MASS_LIMIT {
        return Err(Error::TruncationInadequate(format!(
            "tail mass {tail_mass:.3e} beyond level {truncation} exceeds {TAIL_MASS_LIMIT:e}"
        )));
    }

    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > probabilities[best] {
            best = i;
        }
    }
    let p_best = probabilities[best];
    let argmax_tie = probabilities
        .iter()
        .enumerate()
        .any(|(i, &p)| i != best && (p_best - p).abs() <= 1e-12 * p_best);

    let mean_energy_after = probabilities
        .iter()
        .zip(1..=m_max)
        .map(|(&p, m)| p * level_energy(m, expanded))
        .sum();

    Ok(BoxExpansionRun {
        expanded_length: expanded,
        most_probable_m: best as u32 + 1,
        argmax_tie,
        mean_energy_before: level_energy(n, length),
        mean_energy_after,
        tail_mass,
        wavelength_residual: None,
        probabilities,
    })
}
