//! Scenario execution. Produces the report, results and sweep data in memory.

use branchwise_core::conservation::{
    commutator_defect, conservation_report, BranchRow, ConservationReport, Tolerances, Verdict,
};
use branchwise_core::scenario::beamsplitter::{minimum_cutoff, INTERACTION_UNITARITY_TOL};
use branchwise_core::scenario::box_expansion::level_energy;
use branchwise_core::scenario::equivalence::{equivalence_interaction, mass_position};
use branchwise_core::scenario::photon::canonical_target;
use branchwise_core::scenario::{
    box_overlap, run_beamsplitter, run_box_expansion, run_equivalence, run_photon_counting, BeamsplitterSpec,
    BoxExpansionSpec, EquivalenceSpec, PhotonCountingSpec,
};
use serde_json::{json, Value};

use crate::config::{format_range, RunConfig, Scenario};
use crate::format::{g6, round_json, Table};
use crate::fuzz::run_fuzz;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Columnar sweep data with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    /// Machine-readable results, already rounded to 12 significant digits.
    pub results: Value,
    pub data: Option<DataTable>,
    /// Verdicts that differed from the asserted one, as `(check, verdict)`.
    pub assertion_failures: Vec<(String, Verdict)>,
}

impl Outcome {
    pub fn results_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("json value") + "\n"
    }

    pub fn data_csv(&self) -> Option<Result<Vec<u8>, csv::Error>> {
        let table = self.data.as_ref()?;
        let write = || {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|x| format!("{:?}", crate::format::sig12(*x))))?;
            }
            w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
        };
        Some(write())
    }
}

struct Body {
    report: String,
    results: Value,
    data: Option<DataTable>,
    verdicts: Vec<(String, Verdict)>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.check_assertion()?;
    let body = match &cfg.scenario {
        Scenario::Box(spec) => box_body(spec)?,
        Scenario::Photon(spec) => photon_body(spec, &cfg.tolerances)?,
        Scenario::Beamsplitter(spec) => beamsplitter_body(spec, &cfg.tolerances)?,
        Scenario::Equivalence(spec) => equivalence_body(spec, &cfg.tolerances)?,
        Scenario::Fuzz(campaign) => {
            let f = run_fuzz(campaign, cfg.seed, &cfg.tolerances)?;
            Body { report: f.report, results: f.results, data: None, verdicts: f.verdicts }
        }
    };
    let assertion_failures: Vec<(String, Verdict)> = match cfg.expect {
        Some(want) => body.verdicts.iter().filter(|(_, v)| *v != want).cloned().collect(),
        None => Vec::new(),
    };

    let kind = cfg.scenario.kind().as_str();
    let mut results = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": kind,
        "seed": cfg.seed,
        "parameters": parameters_json(&cfg.scenario),
        "tolerances": {
            "exact_tol": cfg.tolerances.exact,
            "avg_tol": cfg.tolerances.average,
            "cluster_tol": cfg.tolerances.cluster,
            "weight_floor": cfg.tolerances.weight_floor,
        },
        "results": body.results,
        "assertion": cfg.expect.map(|want| json!({
            "expected": want,
            "passed": assertion_failures.is_empty(),
            "failures": assertion_failures.len(),
        })),
    });
    round_json(&mut results);

    let mut report = format!("scenario: {kind}\nseed: {}\n", cfg.seed);
    report += &format!(
        "tolerances: exact {}  avg {}  cluster {}\n\n",
        g6(cfg.tolerances.exact),
        g6(cfg.tolerances.average),
        g6(cfg.tolerances.cluster)
    );
    report += &body.report;
    if let Some(want) = cfg.expect {
        if assertion_failures.is_empty() {
            report += &format!("\nassert {want}: passed ({} checks)\n", body.verdicts.len());
        } else {
            report += &format!("\nassert {want}: FAILED ({} of {} checks)\n", assertion_failures.len(), body.verdicts.len());
        }
    }
    Ok(Outcome { report, results, data: body.data, assertion_failures })
}

fn parameters_json(s: &Scenario) -> Value {
    match s {
        Scenario::Box(p) => serde_json::to_value(p),
        Scenario::Photon(p) => serde_json::to_value(p),
        Scenario::Beamsplitter(p) => serde_json::to_value(p),
        Scenario::Equivalence(p) => serde_json::to_value(p),
        Scenario::Fuzz(c) => Ok(json!({
            "dims": format_range(&c.dims),
            "seeds": format_range(&c.seeds),
            "family": c.family,
        })),
    }
    .expect("serializable parameters")
}

fn report_json(r: &ConservationReport<f64>) -> Value {
    json!({
        "verdict": r.verdict,
        "commutator_defect": r.commutator_defect,
        "average_defect": r.average_defect,
        "max_leakage": r.max_leakage(),
        "branches": r.branch_rows.iter().map(branch_row_json).collect::<Vec<_>>(),
    })
}

fn branch_row_json(b: &BranchRow<f64>) -> Value {
    json!({ "eigenvalue": b.eigenvalue, "weight": b.weight, "leakage": b.leakage })
}

fn report_text(title: &str, r: &ConservationReport<f64>) -> String {
    let mut s = format!("{title}\n");
    s += &format!("  verdict            {}\n", r.verdict);
    s += &format!("  commutator defect  {}\n", g6(r.commutator_defect));
    s += &format!("  average defect     {}\n", g6(r.average_defect));
    let mut t = Table::new(["eigenvalue", "weight", "leakage"]);
    for b in &r.branch_rows {
        t.row(vec![g6(b.eigenvalue), g6(b.weight), g6(b.leakage)]);
    }
    s + &t.render()
}

/// Truncations reported in the convergence table for a box run at `m`.
pub fn convergence_truncations(m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [m / 8, m / 4, m / 2, m, 2 * m].into_iter().filter(|&k| k > 0).collect();
    v.dedup();
    v
}

/// `Σ_{m≤M} p_m E'_m` and `1 − Σ_{m≤M} p_m` for each truncation in `ms` (ascending).
pub fn box_convergence(spec: &BoxExpansionSpec, ms: &[usize]) -> Result<Vec<(usize, f64, f64)>, CliError> {
    let expanded = spec.expanded_length();
    let mut out = Vec::new();
    let (mut energy, mut mass, mut m) = (0.0, 0.0, 0usize);
    for &target in ms {
        while m < target {
            m += 1;
            let level = u32::try_from(m).map_err(|_| CliError::Config("basis_truncation too large".into()))?;
            let c = box_overlap(spec.quantum_number, spec.box_length, level, expanded)?;
            energy += c * c * level_energy(level, expanded);
            mass += c * c;
        }
        out.push((target, energy, 1.0 - mass));
    }
    Ok(out)
}

fn box_body(spec: &BoxExpansionSpec) -> Result<Body, CliError> {
    let run = run_box_expansion(spec)?;
    let expanded = run.expanded_length;
    let energies: Vec<f64> = (1..=spec.basis_truncation as u32).map(|m| level_energy(m, expanded)).collect();

    let mut ranked: Vec<usize> = (0..run.probabilities.len()).collect();
    ranked.sort_by(|&a, &b| run.probabilities[b].total_cmp(&run.probabilities[a]).then(a.cmp(&b)));
    ranked.truncate(10);
    let convergence = box_convergence(spec, &convergence_truncations(spec.basis_truncation))?;
    let target = run.mean_energy_before;

    let mut report = String::from("sudden box expansion\n");
    report += &format!("  L = {}  n = {}  eps = {}  L' = {}\n", g6(spec.box_length), spec.quantum_number, g6(spec.epsilon), g6(expanded));
    report += &format!("  most probable m    {}{}\n", run.most_probable_m, if run.argmax_tie { " (tie)" } else { "" });
    report += &format!("  mean energy before {}\n", g6(run.mean_energy_before));
    report += &format!("  mean energy after  {}\n", g6(run.mean_energy_after));
    report += &format!("  relative error     {}\n", g6(run.energy_relative_error()));
    report += &format!("  tail mass          {}\n", g6(run.tail_mass));
    if let Some(r) = run.wavelength_residual {
        report += &format!("  wavelength resid.  {}\n", g6(r));
    }
    report += "\nmost probable levels\n";
    let mut t = Table::new(["m", "probability", "energy"]);
    for &i in &ranked {
        t.row(vec![(i + 1).to_string(), g6(run.probabilities[i]), g6(energies[i])]);
    }
    report += &t.render();
    report += "\nconvergence in basis truncation\n";
    let mut t = Table::new(["M", "mean energy", "relative error", "tail mass"]);
    for &(m, e, tail) in &convergence {
        t.row(vec![m.to_string(), g6(e), g6((e - target).abs() / target), g6(tail)]);
    }
    report += &t.render();

    let results = json!({
        "expanded_length": expanded,
        "most_probable_m": run.most_probable_m,
        "argmax_tie": run.argmax_tie,
        "mean_energy_before": run.mean_energy_before,
        "mean_energy_after": run.mean_energy_after,
        "energy_relative_error": run.energy_relative_error(),
        "tail_mass": run.tail_mass,
        "wavelength_residual": run.wavelength_residual,
        "top_levels": ranked.iter().map(|&i| json!({
            "m": i + 1, "probability": run.probabilities[i], "energy": energies[i],
        })).collect::<Vec<_>>(),
        "convergence": convergence.iter().map(|&(m, e, tail)| json!({
            "truncation": m, "mean_energy": e, "relative_error": (e - target).abs() / target, "tail_mass": tail,
        })).collect::<Vec<_>>(),
    });
    let data = DataTable {
        headers: vec!["m", "probability", "energy"],
        rows: run.probabilities.iter().zip(&energies).enumerate().map(|(i, (&p, &e))| vec![(i + 1) as f64, p, e]).collect(),
    };
    Ok(Body { report, results, data: Some(data), verdicts: Vec::new() })
}

fn photon_body(spec: &PhotonCountingSpec, tols: &Tolerances<f64>) -> Result<Body, CliError> {
    let run = run_photon_counting(spec, tols)?;
    let target_fidelity = if *spec == PhotonCountingSpec::canonical() {
        Some(run.final_state.fidelity(&canonical_target(spec)?)?)
    } else {
        None
    };

    let mut report = report_text("total energy, initial branches", &run.report);
    report += &format!("\n  energy before      {}\n", g6(run.energy_before));
    report += &format!("  energy after       {}\n", g6(run.energy_after));
    if let Some(f) = target_fidelity {
        report += &format!("  target fidelity    {}\n", g6(f));
    }
    report += "\nfinal branches\n";
    let mut t = Table::new(["energy", "weight", "leakage", "P(field vacuum)", "apparatus k"]);
    for b in &run.branch_table {
        t.row(vec![g6(b.energy), g6(b.weight), g6(b.leakage), g6(b.field_vacuum_probability), g6(b.apparatus_excitations)]);
    }
    report += &t.render();

    let results = json!({
        "conservation": report_json(&run.report),
        "energy_before": run.energy_before,
        "energy_after": run.energy_after,
        "target_fidelity": target_fidelity,
        "final_branches": run.branch_table,
    });
    Ok(Body { report, results, data: None, verdicts: vec![("total energy".into(), run.report.verdict)] })
}

/// Kick scales used for the visibility sweep.
pub fn kick_scales() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 10.0).collect()
}

fn beamsplitter_body(spec: &BeamsplitterSpec, tols: &Tolerances<f64>) -> Result<Body, CliError> {
    let run = run_beamsplitter(spec, tols)?;
    let closed_form = (-spec.momentum_kick.norm_sqr() / 2.0).exp();

    let mut sweep = Vec::new();
    for s in kick_scales() {
        let delta = spec.momentum_kick * s;
        let point = BeamsplitterSpec {
            momentum_kick: delta,
            fock_cutoff: spec.fock_cutoff.max(minimum_cutoff(spec.coherent_amplitude, delta)),
            ..*spec
        };
        let r = run_beamsplitter(&point, tols)?;
        let exact = (-delta.norm_sqr() / 2.0).exp();
        sweep.push(vec![s, delta.norm(), r.visibility, exact, (r.visibility - exact).abs()]);
    }

    let mut report = String::from("recoiling beamsplitter\n");
    report += &format!("  visibility         {}\n", g6(run.visibility));
    report += &format!("  exp(-|d|^2/2)      {}\n", g6(closed_form));
    report += &format!("  unitarity defect   {}\n", g6(run.interaction_unitarity_defect));
    report += &format!("  momentum balanced  {}\n", run.bookkeeping_holds());
    let mut t = Table::new(["branch", "weight", "pointer p before", "pointer p after", "photon dp", "net dp"]);
    for b in &run.branch_table {
        t.row(vec![
            b.label.to_string(),
            g6(b.weight),
            g6(b.pointer_momentum_before),
            g6(b.pointer_momentum_after),
            g6(b.photon_momentum_change),
            g6(b.net_momentum_change),
        ]);
    }
    report += &t.render();
    report += "\n";
    report += &report_text("which-path label", &run.path_report);

    let results = json!({
        "visibility": run.visibility,
        "closed_form_visibility": closed_form,
        "overlap": [run.overlap.re, run.overlap.im],
        "interaction_unitarity_defect": run.interaction_unitarity_defect,
        "interaction_unitary": run.interaction_unitarity_defect <= INTERACTION_UNITARITY_TOL,
        "momentum_bookkeeping": run.bookkeeping_holds(),
        "branches": run.branch_table,
        "path_conservation": report_json(&run.path_report),
    });
    let data = DataTable { headers: vec!["kick_scale", "kick_abs", "visibility", "closed_form", "abs_error"], rows: sweep };
    Ok(Body { report, results, data: Some(data), verdicts: vec![("which-path label".into(), run.path_report.verdict)] })
}

fn equivalence_body(spec: &EquivalenceSpec, tols: &Tolerances<f64>) -> Result<Body, CliError> {
    let run = run_equivalence(spec)?;
    let q = mass_position()?;
    let u = equivalence_interaction()?;
    let report_pos = conservation_report(&spec.initial_state()?, &q, &u, tols)?;
    debug_assert_eq!(commutator_defect(&q, &u)?, report_pos.commutator_defect);
    let fidelity = run.final_state.fidelity(&spec.branched_state()?)?;

    let mut report = String::from("superposed source mass\n");
    report += &format!("  branch correlation {}\n", if run.branch_correlation_check { "ok" } else { "BROKEN" });
    report += &format!("  max cross amplitude {}\n", g6(run.max_cross_branch_amplitude));
    report += &format!("  target fidelity    {}\n", g6(fidelity));
    let mut t = Table::new(["mass position", "weight"]);
    for b in &run.mass_branches.branches {
        t.row(vec![g6(b.eigenvalue), g6(b.weight)]);
    }
    report += &t.render();
    report += "\n";
    report += &report_text("mass position", &report_pos);

    let results = json!({
        "branch_correlation_check": run.branch_correlation_check,
        "max_cross_branch_amplitude": run.max_cross_branch_amplitude,
        "target_fidelity": fidelity,
        "mass_branches": run.mass_branches.branches.iter().map(|b| json!({
            "eigenvalue": b.eigenvalue, "weight": b.weight,
        })).collect::<Vec<_>>(),
        "position_conservation": report_json(&report_pos),
    });
    Ok(Body { report, results, data: None, verdicts: vec![("mass position".into(), report_pos.verdict)] })
}
