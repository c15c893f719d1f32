//! Sweep engine: determinism, caching and resumption.

use std::fs;

use redshift_chain::eigensolve::SolverOptions;
use redshift_chain::harness::sweep::log_path;
use redshift_chain::harness::{run_sweep, Figure, ModelKind, Status, SweepSpec};
use redshift_chain::model::Preset;
use redshift_chain::Error;

fn small_fig4() -> SweepSpec {
    SweepSpec {
        lengths: vec![8],
        z_values: vec![-1.0, 0.0],
        distances: vec![5.0, 10.0],
        ..SweepSpec::preset(Figure::Fig4, false)
    }
}

#[test]
fn cached_and_uncached_rows_are_identical() {
    let cached = run_sweep(&small_fig4()).unwrap();
    let uncached = run_sweep(&SweepSpec { use_cache: false, ..small_fig4() }).unwrap();
    assert_eq!(cached.csv, uncached.csv);
    assert!(cached.solves < uncached.solves, "{} vs {}", cached.solves, uncached.solves);
    assert_eq!(uncached.solves, 2 * cached.records.len());
}

#[test]
fn fig3_reuses_the_bare_chain() {
    let spec = SweepSpec { lengths: vec![8, 10], ..SweepSpec::preset(Figure::Fig3, false) };
    let out = run_sweep(&spec).unwrap();
    // 2 models x 2 lengths bare chains, plus placements; edge and middle share k at L = 8
    assert!(out.solves < 3 * out.records.len());
    for r in &out.records {
        assert_eq!(r.status, Status::Ok);
        let (e0, e1) = (r.e0.unwrap(), r.e1.unwrap());
        assert!(e1 > e0, "redshift lowers every coupling, so the energy rises");
    }
    let header = out.csv.lines().next().unwrap();
    assert_eq!(header, "model,config,L,k1,k2,d,GM,E0,E1,E2,abs_E0_E1,status");
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_sweep(&small_fig4()).unwrap().csv)
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn interrupted_sweep_resumes_missing_rows_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let spec = SweepSpec { output: Some(path.clone()), ..small_fig4() };
    let full = run_sweep(&spec).unwrap();
    let complete = fs::read_to_string(&path).unwrap();
    assert_eq!(complete, full.csv);

    // drop the last five rows as if the run had been killed
    let lines: Vec<&str> = complete.lines().collect();
    let kept = lines.len() - 5;
    fs::write(&path, lines[..kept].join("\n") + "\n").unwrap();

    let resumed = run_sweep(&spec).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), complete);
    assert_eq!(resumed.records.iter().filter(|r| !r.resumed).count(), 5);
    assert!(resumed.solves <= 10);

    let again = run_sweep(&spec).unwrap();
    assert_eq!(again.solves, 0);
    assert!(log_path(&path).exists());
}

#[test]
fn foreign_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    fs::write(&path, "k1,k2,model,Jz,M,gap,status\n").unwrap();
    let spec = SweepSpec { output: Some(path), lengths: vec![8], ..SweepSpec::preset(Figure::Fig6, false) };
    assert!(matches!(run_sweep(&spec), Err(Error::SchemaMismatch { .. })));
}

#[test]
fn massless_custom_point_has_unit_visibility() {
    let spec = SweepSpec {
        models: vec![ModelKind::XXZ],
        lengths: vec![10],
        configs: vec![Preset::Edge, Preset::Middle],
        gm_values: vec![0.0],
        z_values: Vec::new(),
        distances: vec![10.0],
        ..SweepSpec::preset(Figure::Custom, false)
    };
    let out = run_sweep(&spec).unwrap();
    assert_eq!(out.records.len(), 2);
    for r in &out.records {
        assert_eq!(r.m(), Some(1.0));
        assert_eq!(r.one_minus_m(), Some(0.0));
        assert_eq!(r.status, Status::Ok);
    }
    // both placements give the unperturbed chain, solved once
    assert_eq!(out.solves, 1);
}

#[test]
fn degenerate_points_are_flagged_and_logged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    let spec = SweepSpec {
        output: Some(path.clone()),
        lengths: vec![10],
        models: vec![ModelKind::XX],
        ..SweepSpec::preset(Figure::Fig6, false)
    };
    let out = run_sweep(&spec).unwrap();
    // the black hole at bond 1 cuts off site 1, which then carries no field
    assert_eq!(out.records[0].status, Status::Degenerate);
    let log = fs::read_to_string(log_path(&path)).unwrap();
    assert!(log.starts_with("XX,0.0,1,9\tdegenerate"));
    assert_eq!(log.lines().count(), out.records.len() - out.count(&Status::Ok));
}

#[test]
fn unconverged_points_do_not_stop_the_sweep() {
    let solver = SolverOptions {
        dense_threshold: 0,
        max_restarts: 0,
        max_basis: 4,
        tolerance: 1e-14,
        scan_tolerance: 1e-14,
        ..SolverOptions::default()
    };
    let spec = SweepSpec { solver, lengths: vec![10], models: vec![ModelKind::XXZ], ..SweepSpec::preset(Figure::Fig5, false) };
    let out = run_sweep(&spec).unwrap();
    assert_eq!(out.records.len(), 4);
    assert!(out.records.iter().all(|r| r.status == Status::Unconverged));
    assert!(out.csv.lines().skip(1).all(|l| l.ends_with(",,,unconverged")));
}
