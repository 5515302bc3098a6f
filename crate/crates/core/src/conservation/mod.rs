//! Branch-by-branch conservation.
//!
//! A unitary `U` conserves `Q` exactly when `[Q, U] = 0`. Equivalently `U`
//! maps every eigenspace of `Q` into itself, so each term of a state expanded
//! in the eigenbasis of `Q` (a *branch*) keeps its eigenvalue. Conservation on
//! average, `⟨Q⟩` unchanged for one particular state, is strictly weaker; the
//! report produced here separates the two.
//!
//! All registers are finite-dimensional. Conserved quantities of an unbounded
//! environment are modeled by truncated registers.

mod branches;
mod generate;
mod report;
mod spectrum;

pub use branches::{spectral_branches, spectral_branches_with, Branch, BranchDecomposition};
pub use generate::{
    average_only_counterexample, average_only_counterexample_in, random_conserving_unitary, random_degenerate_observable,
};
pub use report::{
    commutator_defect, conservation_report, conservation_report_with, max_basis_leakage, BranchRow,
    ConservationReport, Verdict,
};
pub use spectrum::{Cluster, SpectralClusters};

use crate::scalar::Real;

/// Thresholds used by every check in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Bound on the normalized commutator defect for an `EXACT` verdict.
    pub exact: T,
    /// Bound on `|Δ⟨Q⟩|`, relative to the spectral range of `Q`.
    pub average: T,
    /// Relative eigenvalue gap below which levels are merged.
    pub cluster: T,
    /// Branches with smaller weight are dropped and counted as discarded mass.
    pub weight_floor: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            exact: T::tol(1e-9),
            average: T::tol(1e-9),
            cluster: T::tol(1e-8),
            weight_floor: T::tol(1e-12),
        }
    }
}
