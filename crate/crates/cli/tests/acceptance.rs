//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use branchwise_cli::run::box_convergence;
use branchwise_core::conservation::{
    average_only_counterexample_in, commutator_defect, conservation_report, max_basis_leakage,
    random_conserving_unitary, random_degenerate_observable, SpectralClusters, Tolerances, Verdict,
};
use branchwise_core::numeric::{random_hermitian_with, seeded_rng, unitary_from_hamiltonian};
use branchwise_core::scenario::beamsplitter::{coherent_overlap, minimum_cutoff};
use branchwise_core::scenario::photon::canonical_target;
use branchwise_core::scenario::{
    box_overlap, run_beamsplitter, run_box_expansion, run_equivalence, run_photon_counting, BeamsplitterSpec,
    BoxExpansionSpec, EquivalenceSpec, PhotonCountingSpec,
};
use branchwise_core::{CMatrix, Obs, Unitary, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn box_spec(n: u32, eps: f64, m: usize) -> BoxExpansionSpec {
    BoxExpansionSpec::new(1.0, n, eps, m).expect("valid box spec")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for n in 1..=10 {
        for eps in EPSILONS {
            let run = run_box_expansion(&box_spec(n, eps, 2000)).map_err(|e| e.to_string())?;
            if run.most_probable_m != n + 1 || run.argmax_tie {
                wrong.push(format!("(n={n}, eps={eps}) -> m={}", run.most_probable_m));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(wrong.is_empty() && secs <= 10.0, format!("30/30 grid points at m = n+1 unless listed {wrong:?}; {secs:.2} s"))
}

fn criterion_2() -> Check {
    let truncations = [250, 500, 1000, 2000, 4000];
    let mut worst = 0.0f64;
    let mut monotone = true;
    println!("    convergence of |<E'> - E|/E in basis truncation M (L = 1, eps = 0.1)");
    println!("    {:>3} {}", "n", truncations.map(|m| format!("{m:>12}")).join(""));
    for n in 1..=5 {
        let spec = box_spec(n, 0.1, 2000);
        let run = run_box_expansion(&spec).map_err(|e| e.to_string())?;
        let target = (f64::from(n) * std::f64::consts::PI).powi(2);
        worst = worst.max((run.mean_energy_after - target).abs() / target);
        for eps in EPSILONS {
            let r = run_box_expansion(&box_spec(n, eps, 2000)).map_err(|e| e.to_string())?;
            worst = worst.max((r.mean_energy_after - target).abs() / target);
        }
        let rows = box_convergence(&spec, &truncations).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = rows.iter().map(|&(_, e, _)| (e - target).abs() / target).collect();
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);
        println!("    {n:>3} {}", errs.iter().map(|e| format!("{e:>12.3e}")).collect::<String>());
    }
    ensure(worst <= 5e-3 && monotone, format!("worst relative error {worst:.3e} at M = 2000; monotone: {monotone}"))
}

fn criterion_3() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=10 {
        for eps in EPSILONS {
            let run = run_box_expansion(&box_spec(n, eps, 2000)).map_err(|e| e.to_string())?;
            // independent of the run: recompute both sides from the inputs
            let lambda = 2.0 / f64::from(n);
            let expanded = 1.0 + 0.5 * lambda * (1.0 - eps);
            let lhs = 2.0 * expanded / f64::from(n + 1);
            let rhs = lambda * (1.0 - eps / f64::from(n + 1));
            worst = worst.max((lhs - rhs).abs()).max(run.wavelength_residual.unwrap_or(f64::INFINITY));
            worst = worst.max((run.expanded_length - expanded).abs());
        }
    }
    ensure(worst <= 1e-12, format!("max residual {worst:.3e}"))
}

fn criterion_4() -> Check {
    let spec = PhotonCountingSpec::canonical();
    let run = run_photon_counting(&spec, &Tolerances::default()).map_err(|e| e.to_string())?;
    let fidelity = run.final_state.fidelity(&canonical_target(&spec).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let expected = spec.apparatus_base_energy + 5.0 * spec.mode_energy;
    let de = (run.energy_before - expected).abs().max((run.energy_after - expected).abs());
    let leaks: Vec<f64> = run.report.branch_rows.iter().map(|r| r.leakage).collect();
    let ok = fidelity >= 1.0 - 1e-10
        && de <= 1e-10
        && run.report.verdict == Verdict::Exact
        && leaks.len() == 2
        && leaks.iter().all(|&l| l <= 1e-10);
    ensure(
        ok,
        format!("fidelity {fidelity:.15}, energy error {de:.1e}, verdict {}, leakages {leaks:?}", run.report.verdict),
    )
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut disagreements = 0;
    let mut conserving_exact = 0;
    let mut exact = 0;
    for trial in 0..100u64 {
        let dim = 2 + (trial as usize % 11);
        let q: Obs = random_degenerate_observable(dim, trial).map_err(|e| e.to_string())?;
        let mut u = random_conserving_unitary(&q, trial, 1e-8).map_err(|e| e.to_string())?;
        if trial % 2 == 1 {
            let mut rng = seeded_rng(trial ^ 0x5eed);
            let eta: f64 = rng.random_range(0.2..1.0);
            let h: CMatrix = random_hermitian_with(dim, &mut rng);
            let kick = Unitary::new(q.space().clone(), unitary_from_hamiltonian(&h, eta).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            u = u.compose(&kick).map_err(|e| e.to_string())?;
        }
        let clusters = SpectralClusters::new(&q, 1e-8).map_err(|e| e.to_string())?;
        let a = commutator_defect(&q, &u).map_err(|e| e.to_string())? <= 1e-10;
        let b = clusters.max_inter_block_norm(u.matrix()) <= 1e-9;
        let c = max_basis_leakage(&clusters, &u).map_err(|e| e.to_string())? <= 1e-9;
        if !(a == b && b == c) {
            disagreements += 1;
        }
        exact += usize::from(a);
        conserving_exact += usize::from(a && trial % 2 == 0);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        disagreements == 0 && conserving_exact == 50 && secs <= 30.0,
        format!("{disagreements} disagreements over 100 trials ({exact} exact); {secs:.2} s"),
    )
}

fn criterion_6() -> Check {
    let tols = Tolerances::default();
    let (mut worst_avg, mut min_leak, mut bad) = (0.0f64, f64::INFINITY, 0);
    for seed in 0..100u64 {
        let half = 1 + (seed as usize % 6);
        let (q, u, psi) = average_only_counterexample_in::<f64>(half, seed).map_err(|e| e.to_string())?;
        let r = conservation_report(&psi, &q, &u, &tols).map_err(|e| e.to_string())?;
        worst_avg = worst_avg.max(r.average_defect);
        min_leak = min_leak.min(r.max_leakage());
        bad += usize::from(r.verdict != Verdict::AverageOnly || r.average_defect > 1e-12 || r.max_leakage() < 0.1);
    }
    ensure(bad == 0, format!("{bad} failing triples; max average defect {worst_avg:.2e}, min max-leakage {min_leak:.3}"))
}

fn random_alphas() -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..10).map(|_| C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect()
}

fn kick(magnitude: f64, k: usize) -> C64 {
    C64::from_polar(magnitude, 0.7 * k as f64)
}

const KICKS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];

fn criterion_7() -> Check {
    let tols = Tolerances::default();
    let (mut worst_vis, mut worst_unit) = (0.0f64, 0.0f64);
    let mut zero_exact = true;
    for (k, alpha) in random_alphas().into_iter().enumerate() {
        for mag in KICKS {
            let delta = kick(mag, k);
            let run = run_beamsplitter(&BeamsplitterSpec::balanced(alpha, delta), &tols).map_err(|e| e.to_string())?;
            worst_vis = worst_vis.max((run.visibility - oracles::visibility_closed_form(delta)).abs());
            worst_unit = worst_unit.max(run.interaction_unitarity_defect);
            if mag == 0.0 {
                zero_exact &= run.visibility == 1.0;
            }
        }
    }
    ensure(
        worst_vis <= 1e-7 && worst_unit <= 1e-9 && zero_exact,
        format!("max visibility error {worst_vis:.2e}, max unitarity defect {worst_unit:.2e}, delta = 0 exact: {zero_exact}"),
    )
}

fn criterion_8() -> Check {
    let spec = EquivalenceSpec::balanced();
    let run = run_equivalence(&spec).map_err(|e| e.to_string())?;
    let fidelity = run.final_state.fidelity(&spec.branched_state().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(
        fidelity >= 1.0 - 1e-12 && run.max_cross_branch_amplitude <= 1e-12 && run.branch_correlation_check,
        format!("fidelity {fidelity:.15}, max cross-branch amplitude {:.1e}", run.max_cross_branch_amplitude),
    )
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_box = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=10u32);
        let m = rng.random_range(1..=40u32);
        let length: f64 = rng.random_range(0.5..2.0);
        let expanded = length * rng.random_range(1.0..2.5);
        let closed = box_overlap(n, length, m, expanded).map_err(|e| e.to_string())?;
        worst_box = worst_box.max((closed - oracles::box_overlap_quadrature(n, length, m, expanded)).abs());
    }
    let mut worst_coh = 0.0f64;
    for (k, alpha) in random_alphas().into_iter().enumerate() {
        for mag in KICKS {
            let delta = kick(mag, k);
            let numeric = coherent_overlap(alpha, delta, minimum_cutoff(alpha, delta)).map_err(|e| e.to_string())?;
            worst_coh = worst_coh.max((numeric - oracles::coherent_inner_closed_form(alpha - delta, alpha)).norm());
        }
    }
    ensure(
        worst_box <= 1e-10 && worst_coh <= 1e-8,
        format!("box overlap vs quadrature {worst_box:.2e}; coherent overlap vs closed form {worst_coh:.2e}"),
    )
}

fn criterion_10() -> Check {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let cases: [(&str, &str, &[&str]); 4] = [
        ("box.json", "box", &[]),
        ("photon.json", "photon", &[]),
        ("beamsplitter.json", "beamsplitter", &[]),
        ("fuzz_conserving.json", "fuzz", &["--seed", "17"]),
    ];
    let mut mismatched = Vec::new();
    for (file, kind, extra) in cases {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let status = Command::new(env!("CARGO_BIN_EXE_branchwise"))
                .arg("run")
                .arg("--config")
                .arg(configs.join(file))
                .args(extra)
                .env("BRANCHWISE_OUT_DIR", dir.path())
                .output()
                .map_err(|e| e.to_string())?
                .status;
            if !status.success() {
                return Err(format!("{file}: exit status {status}"));
            }
            let mut bytes = std::fs::read(dir.path().join(format!("{kind}_results.json"))).map_err(|e| e.to_string())?;
            if let Ok(csv) = std::fs::read(dir.path().join(format!("{kind}_data.csv"))) {
                bytes.extend(csv);
            }
            outputs.push(bytes);
        }
        if outputs[0] != outputs[1] {
            mismatched.push(file);
        }
    }
    ensure(mismatched.is_empty(), format!("4 configs run twice; differing outputs: {mismatched:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("box most probable level is n+1", criterion_1),
        ("box mean energy conserved", criterion_2),
        ("box wavelength identity", criterion_3),
        ("photon counting branches", criterion_4),
        ("commutator/branch equivalence", criterion_5),
        ("average-only counterexamples", criterion_6),
        ("beamsplitter visibility", criterion_7),
        ("source-mass branching", criterion_8),
        ("oracle agreement", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
