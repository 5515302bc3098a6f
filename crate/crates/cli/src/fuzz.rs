//! Seeded fuzz campaigns over conserving and average-only unitaries.

use std::collections::BTreeMap;

use branchwise_core::conservation::{
    average_only_counterexample_in, conservation_report, random_conserving_unitary, random_degenerate_observable,
    ConservationReport, Tolerances, Verdict,
};
use branchwise_core::numeric::{random_unit_vector_with, seeded_rng};
use branchwise_core::State;
use serde_json::{json, Value};

use crate::config::{format_range, Family, FuzzCampaign};
use crate::format::{g6, Table};
use crate::CliError;

const STATE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone)]
pub struct Trial {
    pub seed: u64,
    pub dim: usize,
    pub report: ConservationReport<f64>,
}

pub struct FuzzOutcome {
    pub trials: Vec<Trial>,
    pub report: String,
    pub results: Value,
    pub verdicts: Vec<(String, Verdict)>,
}

/// Seed actually fed to the generators for trial `seed` under base seed `base`.
pub fn trial_seed(base: u64, seed: u64) -> u64 {
    base.rotate_left(32) ^ seed
}

pub fn run_trial(family: Family, dim: usize, seed: u64, tols: &Tolerances<f64>) -> Result<Trial, CliError> {
    let (dim, report) = match family {
        Family::Conserving => {
            let q = random_degenerate_observable::<f64>(dim, seed)?;
            let u = random_conserving_unitary(&q, seed, tols.cluster)?;
            let psi = State::new(q.space().clone(), random_unit_vector_with(dim, &mut seeded_rng(seed ^ STATE_SALT)))?;
            (dim, conservation_report(&psi, &q, &u, tols)?)
        }
        Family::AverageOnly => {
            let half = (dim / 2).max(1);
            let (q, u, psi) = average_only_counterexample_in::<f64>(half, seed)?;
            (2 * half, conservation_report(&psi, &q, &u, tols)?)
        }
    };
    Ok(Trial { seed, dim, report })
}

#[derive(Default)]
struct Category {
    count: usize,
    max_commutator_defect: f64,
    max_average_defect: f64,
    max_leakage: f64,
    min_leakage: f64,
}

pub fn run_fuzz(campaign: &FuzzCampaign, base_seed: u64, tols: &Tolerances<f64>) -> Result<FuzzOutcome, CliError> {
    let span = (campaign.dims.end - campaign.dims.start) as u64;
    let trials = campaign
        .seeds
        .clone()
        .map(|s| {
            let dim = campaign.dims.start + ((s - campaign.seeds.start) % span) as usize;
            run_trial(campaign.family, dim, trial_seed(base_seed, s), tols).map(|t| Trial { seed: s, ..t })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut cats: BTreeMap<&'static str, Category> = BTreeMap::new();
    for t in &trials {
        let c = cats.entry(t.report.verdict.as_str()).or_insert_with(|| Category { min_leakage: f64::INFINITY, ..Default::default() });
        let leak = t.report.max_leakage();
        c.count += 1;
        c.max_commutator_defect = c.max_commutator_defect.max(t.report.commutator_defect);
        c.max_average_defect = c.max_average_defect.max(t.report.average_defect);
        c.max_leakage = c.max_leakage.max(leak);
        c.min_leakage = c.min_leakage.min(leak);
    }

    let mut report = format!(
        "fuzz campaign\n  family {}  dims {}  seeds {}  trials {}\n\n",
        campaign.family.as_str(),
        format_range(&campaign.dims),
        format_range(&campaign.seeds),
        trials.len()
    );
    let mut t = Table::new(["verdict", "count", "max comm. defect", "max avg defect", "min max-leakage", "max leakage"]);
    for (name, c) in &cats {
        t.row(vec![
            name.to_string(),
            c.count.to_string(),
            g6(c.max_commutator_defect),
            g6(c.max_average_defect),
            g6(c.min_leakage),
            g6(c.max_leakage),
        ]);
    }
    report += &t.render();

    let results = json!({
        "family": campaign.family,
        "trials": trials.len(),
        "categories": cats.iter().map(|(name, c)| (name.to_string(), json!({
            "count": c.count,
            "max_commutator_defect": c.max_commutator_defect,
            "max_average_defect": c.max_average_defect,
            "min_max_leakage": c.min_leakage,
            "max_leakage": c.max_leakage,
        }))).collect::<serde_json::Map<_, _>>(),
        "trial_rows": trials.iter().map(|t| json!({
            "seed": t.seed,
            "dim": t.dim,
            "verdict": t.report.verdict,
            "commutator_defect": t.report.commutator_defect,
            "average_defect": t.report.average_defect,
            "max_leakage": t.report.max_leakage(),
        })).collect::<Vec<_>>(),
    });
    let verdicts = trials.iter().map(|t| (format!("seed {}", t.seed), t.report.verdict)).collect();
    Ok(FuzzOutcome { trials, report, results, verdicts })
}
