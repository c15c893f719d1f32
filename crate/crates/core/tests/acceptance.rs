//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! The full-scale 26-site check takes tens of minutes on one core and is
//! ignored by default: `cargo test --test acceptance -- --ignored`.

use std::io::Write;
use std::time::{Duration, Instant};

use redshift_chain::analysis::{adiabatic_timescale, default_alpha, estimate_dof_bound, overlap};
use redshift_chain::eigensolve::{find_global_ground_state, SolverOptions};
use redshift_chain::hamiltonian::HamiltonianSpec;
use redshift_chain::harness::cli::run_with;
use redshift_chain::harness::oracle::{free_fermion_vs_many_body, lanczos_vs_dense, trivial_limits};
use redshift_chain::harness::{run_sweep, Figure, ModelKind, RunRecord, Status, SweepSpec};
use redshift_chain::model::{build_redshift_profile, ChainSpec, MassModel, Placement, SuperpositionConfig};

fn report(name: &str, passed: bool, detail: &str) {
    // straight to the handle so the line survives libtest's output capture
    let line = format!("ACCEPTANCE {} {name}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(passed, "{name}: {detail}");
}

#[test]
fn eigensolver_matches_dense_diagonalization() {
    let r = lanczos_vs_dense(200, 10, 2024).unwrap();
    let passed = r.max_rel_energy_error <= 1e-9
        && r.min_overlap >= 1.0 - 1e-8
        && r.sector_mismatches == 0
        && r.elapsed < Duration::from_secs(120);
    report(
        "eigensolver-vs-dense",
        passed,
        &format!(
            "{} instances L<=10: max rel dE {:.2e} (tol 1e-9), min |<v|w>| 1-{:.2e} (tol 1e-8) over {} nondegenerate, {} degenerate, {:.1?}",
            r.instances,
            r.max_rel_energy_error,
            1.0 - r.min_overlap,
            r.overlaps_compared,
            r.degenerate,
            r.elapsed
        ),
    );
}

#[test]
fn free_fermion_cross_check() {
    let r = free_fermion_vs_many_body(100, 12, 2025).unwrap();
    let passed = r.max_energy_error <= 1e-9
        && r.max_overlap_error <= 1e-8
        && r.filling_mismatches == 0
        && r.elapsed < Duration::from_secs(120);
    report(
        "free-fermion",
        passed,
        &format!(
            "{} XX instances L<=12: max |dE| {:.2e} (tol 1e-9), max |dM| {:.2e} (tol 1e-8) over {} nondegenerate pairs, {} degenerate, {:.1?}",
            r.instances, r.max_energy_error, r.max_overlap_error, r.overlaps_compared, r.degenerate, r.elapsed
        ),
    );
}

#[test]
fn trivial_limits_hold() {
    let r = trivial_limits(&[8, 10, 12]).unwrap();
    let passed = r.massless_deviation <= 1e-12 && r.identical_deviation <= 1e-12 && r.mirror_rel_difference <= 1e-9;
    report(
        "trivial-limits",
        passed,
        &format!(
            "GM=0: 1-M = {:.2e} (tol 1e-12); identical placements: 1-M = {:.2e}; mirror |E1-E2|/|E0| = {:.2e} (tol 1e-9); {} chains, {:.1?}",
            r.massless_deviation, r.identical_deviation, r.mirror_rel_difference, r.cases, r.elapsed
        ),
    );
}

#[test]
fn decoherence_is_monotone_in_mass_and_distance() {
    let t = Instant::now();
    let out = run_sweep(&SweepSpec::preset(Figure::Fig4, false)).unwrap();
    let not_ok = out.records.len() - out.count(&Status::Ok);
    let delta = |r: &RunRecord| r.one_minus_m().unwrap_or(f64::NAN);

    let mut violations = Vec::new();
    let mut pairs = 0;
    let mut check = |rows: Vec<&RunRecord>, increasing: bool, what: &str| {
        for w in rows.windows(2) {
            pairs += 1;
            let (a, b) = (delta(w[0]), delta(w[1]));
            let ok = if increasing { b >= a } else { b <= a };
            if !ok {
                violations.push(format!("{what} {:?}: {a:e} -> {b:e}", (w[0].params.z, w[0].params.d, w[1].params.d)));
            }
        }
    };
    for model in [ModelKind::XX, ModelKind::XXZ] {
        let (mass_panel, distance_panels) = if model == ModelKind::XX { ('A', ['B', 'C']) } else { ('D', ['E', 'F']) };
        for config in ["edge", "middle"] {
            let rows: Vec<&RunRecord> = out
                .records
                .iter()
                .filter(|r| r.params.model == model && r.params.panel == Some(mass_panel))
                .filter(|r| r.params.config.map(|c| c.as_str()) == Some(config))
                .collect();
            check(rows, true, &format!("{model} {config} vs z"));
        }
        for panel in distance_panels {
            let rows: Vec<&RunRecord> = out.records.iter().filter(|r| r.params.panel == Some(panel)).collect();
            let mut zs: Vec<f64> = rows.iter().filter_map(|r| r.params.z).collect();
            zs.dedup();
            for z in zs {
                let at_z: Vec<&RunRecord> = rows.iter().copied().filter(|r| r.params.z == Some(z)).collect();
                check(at_z, false, &format!("{model} panel {panel} z={z} vs d"));
            }
        }
    }
    let elapsed = t.elapsed();
    let passed = violations.is_empty() && not_ok == 0 && pairs > 0 && elapsed < Duration::from_secs(600);
    report(
        "monotonicity-L12",
        passed,
        &format!(
            "{pairs} consecutive pairs over {} rows, {} violations, {not_ok} rows not ok, {elapsed:.1?} {}",
            out.records.len(),
            violations.len(),
            violations.first().map(String::as_str).unwrap_or("")
        ),
    );
}

#[test]
#[ignore = "26-site chain: tens of minutes and ~3 GB"]
fn full_scale_headline_visibility() {
    let t = Instant::now();
    let chain = ChainSpec::xxz(26).unwrap();
    let config = SuperpositionConfig::edge(26, 10.0).unwrap();
    let mass = MassModel::Newtonian { gm: 1.0 };
    let opts = SolverOptions::default();
    let solve = |p: &Placement| {
        let profile = build_redshift_profile(&chain, &mass, p).unwrap();
        find_global_ground_state(&HamiltonianSpec::new(&chain, &profile).unwrap(), &opts).unwrap()
    };
    let g1 = solve(&config.left);
    let g2 = solve(&config.right);
    let r = overlap(&g1, &g2).unwrap();
    let n = -1.0 / r.m.ln();
    let passed = (0.8e-4..=3.2e-4).contains(&r.one_minus_m) && (1900.0..=12500.0).contains(&n) && !r.degenerate;
    report(
        "full-scale-L26",
        passed,
        &format!(
            "XXZ edge (3, 23) GM=1 d=10: 1-M = {:e} (accept [8e-5, 3.2e-4]), N = {n:.1} (accept [1900, 12500]), E = {} / {}, n_up = {} / {}, residuals {:.1e} / {:.1e}, degenerate {}, {:.1?}",
            r.one_minus_m,
            g1.energy,
            g2.energy,
            g1.n_up,
            g2.n_up,
            g1.residual,
            g2.residual,
            r.degenerate,
            t.elapsed()
        ),
    );
}

#[test]
fn black_hole_decoheres_more_than_newtonian_mass() {
    let t = Instant::now();
    let bh = run_sweep(&SweepSpec::preset(Figure::Fig6, false)).unwrap();
    let newton = run_sweep(&SweepSpec {
        models: vec![ModelKind::XX, ModelKind::Heisenberg],
        lengths: vec![16],
        field: Some(1.0),
        k1_values: (1..=7).collect(),
        gm_values: vec![1.0],
        z_values: Vec::new(),
        distances: vec![10.0],
        ..SweepSpec::preset(Figure::Custom, false)
    })
    .unwrap();
    assert_eq!(bh.records.len(), newton.records.len());

    let mut worst = f64::NEG_INFINITY;
    let mut below = 0;
    for (b, n) in bh.records.iter().zip(&newton.records) {
        assert_eq!((b.params.model, b.params.k1, b.params.k2), (n.params.model, n.params.k1, n.params.k2));
        let (mb, mn) = (b.m().unwrap(), n.m().unwrap());
        worst = worst.max(mb - mn);
        below += usize::from(mb < mn);
    }

    let chain = ChainSpec::uniform(16, 1.0, 1.0, 1.0).unwrap();
    let black_hole = MassModel::Schwarzschild { rs: 0.5 };
    let clamped = (1..16).all(|k| {
        let p = build_redshift_profile(&chain, &black_hole, &Placement::new(k, 0.0)).unwrap();
        p.site_factors()[k - 1] == 0.0 && p.site_factors()[k] == 0.0
    });
    let flagged = bh.records.len() - bh.count(&Status::Ok);
    let passed = below == bh.records.len() && clamped && t.elapsed() < Duration::from_secs(300);
    report(
        "black-hole-fig6",
        passed,
        &format!(
            "M_BH < M_Newtonian(GM=1, d=10) for {below}/{} placements (max M_BH - M_N = {worst:e}, {flagged} flagged degenerate); site factors at k, k+1 exactly 0: {clamped}; {:.1?}",
            bh.records.len(),
            t.elapsed()
        ),
    );
}

#[test]
fn independent_system_count_arithmetic() {
    let b = estimate_dof_bound(1.0 - 0.00016, default_alpha()).unwrap();
    let t = adiabatic_timescale(1e-25).unwrap();
    let n_ok = (5999.0..=6001.0).contains(&b.n);
    let approx_ok = b.approximation_within(0.05);
    let t_ok = (1.0e-26..=1.3e-26).contains(&t);
    report(
        "dof-bound-arithmetic",
        n_ok && approx_ok && t_ok,
        &format!(
            "N(1-1.6e-4) = {} (accept [5999, 6001]: {n_ok}); 1/delta = {} within {:.4}% of N (accept 5%: {approx_ok}); T(1e-25 kg) = {t:e} s (accept [1.0e-26, 1.3e-26]: {t_ok})",
            b.n,
            b.small_delta,
            100.0 * b.relative_difference
        ),
    );
}

#[test]
fn fig6_sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "2"].iter().enumerate() {
        let path = dir.path().join(format!("fig6-{i}.csv"));
        let args = ["redshift-chain", "--threads", threads, "sweep", "--figure", "6", "--out", path.to_str().unwrap()];
        let code = run_with(args, &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, 0);
        outputs.push(std::fs::read(&path).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let header_ok = outputs[0].starts_with(b"model,Jz,k1,k2,M,status\n");
    report(
        "determinism-fig6",
        identical && header_ok,
        &format!("3 runs (threads 1, 1, 2), {} bytes each, identical: {identical}, header ok: {header_ok}", outputs[0].len()),
    );
}
