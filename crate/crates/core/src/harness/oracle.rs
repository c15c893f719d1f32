//! Cross-checks between independent solution routes.
//!
//! Each check returns the raw discrepancies; callers decide the thresholds.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{self, one_minus_overlap};
use crate::eigensolve::{find_global_ground_state, GroundState, SolverOptions};
use crate::error::Result;
use crate::freefermion::{fill_ground_state, single_particle_from_spec, slater_overlap};
use crate::hamiltonian::HamiltonianSpec;
use crate::model::{build_redshift_profile, ChainSpec, MassModel, Placement, RedshiftProfile};

/// Random valid redshift profile: Newtonian, Schwarzschild, or raw factors.
pub fn random_profile(rng: &mut ChaCha8Rng, chain: &ChainSpec) -> Result<RedshiftProfile> {
    let sites = chain.sites();
    let k = rng.gen_range(1..sites);
    match rng.gen_range(0..3) {
        0 => {
            let d = rng.gen_range(0.5..10.0);
            // the closest term sits at distance d, so GM < d keeps every factor positive
            let gm = rng.gen_range(0.0..0.9 * d);
            build_redshift_profile(chain, &MassModel::Newtonian { gm }, &Placement::new(k, d))
        }
        1 => {
            let d = rng.gen_range(0.0..3.0);
            let rs = rng.gen_range(0.05..1.0);
            build_redshift_profile(chain, &MassModel::Schwarzschild { rs }, &Placement::new(k, d))
        }
        _ => {
            let site = (0..sites).map(|_| rng.gen_range(0.1..=1.0)).collect();
            let bond = (0..sites - 1).map(|_| rng.gen_range(0.1..=1.0)).collect();
            RedshiftProfile::from_factors(site, bond)
        }
    }
}

/// Random chain with `2 <= L <= max_sites`; `jz = None` draws it as well.
pub fn random_chain(rng: &mut ChaCha8Rng, max_sites: usize, jz: Option<f64>) -> Result<ChainSpec> {
    let sites = rng.gen_range(2..=max_sites);
    let jx = rng.gen_range(0.5..1.5);
    let jz = jz.unwrap_or_else(|| rng.gen_range(-1.0..2.0));
    let fields = (0..sites).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ChainSpec::with_fields(sites, 1.0, jx, jz, fields)
}

#[derive(Clone, Debug, Default)]
pub struct EigenReport {
    pub instances: usize,
    pub max_rel_energy_error: f64,
    /// Smallest `|<v_lanczos|v_dense>|` over nondegenerate instances.
    pub min_overlap: f64,
    pub overlaps_compared: usize,
    /// Instances whose dense ground state is degenerate (vector comparison skipped).
    pub degenerate: usize,
    pub sector_mismatches: usize,
    pub elapsed: Duration,
}

/// Thick-restart Lanczos against dense diagonalization on random instances.
pub fn lanczos_vs_dense(instances: usize, max_sites: usize, seed: u64) -> Result<EigenReport> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let krylov = SolverOptions { dense_threshold: 0, ..SolverOptions::default() };
    let dense = SolverOptions { dense_threshold: usize::MAX, ..SolverOptions::default() };
    let mut report = EigenReport { instances, min_overlap: 1.0, ..Default::default() };
    for _ in 0..instances {
        let chain = random_chain(&mut rng, max_sites, None)?;
        let spec = HamiltonianSpec::new(&chain, &random_profile(&mut rng, &chain)?)?;
        let a = find_global_ground_state(&spec, &krylov)?;
        let b = find_global_ground_state(&spec, &dense)?;
        let rel = (a.energy - b.energy).abs() / b.energy.abs().max(f64::MIN_POSITIVE);
        report.max_rel_energy_error = report.max_rel_energy_error.max(rel);
        if b.degenerate {
            report.degenerate += 1;
        } else if a.n_up != b.n_up {
            report.sector_mismatches += 1;
            report.min_overlap = 0.0;
        } else {
            let m = 1.0 - one_minus_overlap(a.vector.amplitudes(), b.vector.amplitudes());
            report.min_overlap = report.min_overlap.min(m);
            report.overlaps_compared += 1;
        }
    }
    report.elapsed = t.elapsed();
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct FreeFermionReport {
    pub instances: usize,
    pub max_energy_error: f64,
    /// Largest `|M_many_body - M_slater|` over nondegenerate pairs.
    pub max_overlap_error: f64,
    pub overlaps_compared: usize,
    pub degenerate: usize,
    /// Instances where the many-body sector differs from the number of filled levels.
    pub filling_mismatches: usize,
    pub elapsed: Duration,
}

/// Many-body XX ground states against the Jordan-Wigner Fermi sea.
pub fn free_fermion_vs_many_body(instances: usize, max_sites: usize, seed: u64) -> Result<FreeFermionReport> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SolverOptions::default();
    let mut report = FreeFermionReport { instances, ..Default::default() };
    for _ in 0..instances {
        let chain = random_chain(&mut rng, max_sites, Some(0.0))?;
        let mut pair = Vec::with_capacity(2);
        for _ in 0..2 {
            let spec = HamiltonianSpec::new(&chain, &random_profile(&mut rng, &chain)?)?;
            let gs = find_global_ground_state(&spec, &opts)?;
            let sea = fill_ground_state(&single_particle_from_spec(&spec)?);
            report.max_energy_error = report.max_energy_error.max((gs.energy - sea.energy()).abs());
            if !sea.is_degenerate() && !gs.degenerate && gs.n_up != sea.filled() {
                report.filling_mismatches += 1;
            }
            pair.push((gs, sea));
        }
        let clean = |g: &GroundState, s: &crate::freefermion::FermiSea| !g.degenerate && !s.is_degenerate();
        if pair.iter().all(|(g, s)| clean(g, s)) {
            let many = analysis::overlap(&pair[0].0, &pair[1].0)?.m;
            let slater = slater_overlap(&pair[0].1, &pair[1].1)?;
            report.max_overlap_error = report.max_overlap_error.max((many - slater).abs());
            report.overlaps_compared += 1;
        } else {
            report.degenerate += 1;
        }
    }
    report.elapsed = t.elapsed();
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct LimitReport {
    /// Largest `1 - M` with the mass switched off.
    pub massless_deviation: f64,
    /// Largest `1 - M` with both branches at the same place.
    pub identical_deviation: f64,
    /// Largest `|E(k) - E(L-k)| / |E_bare|`.
    pub mirror_rel_difference: f64,
    pub cases: usize,
    pub elapsed: Duration,
}

/// Limits where the answer is known without any numerics.
pub fn trivial_limits(lengths: &[usize]) -> Result<LimitReport> {
    let t = Instant::now();
    let opts = SolverOptions::default();
    let mut report = LimitReport::default();
    let solve = |chain: &ChainSpec, mass: &MassModel, k: usize, d: f64| -> Result<GroundState> {
        let p = build_redshift_profile(chain, mass, &Placement::new(k, d))?;
        find_global_ground_state(&HamiltonianSpec::new(chain, &p)?, &opts)
    };
    for &sites in lengths {
        for chain in [ChainSpec::xx(sites)?, ChainSpec::xxz(sites)?] {
            let massless = MassModel::Newtonian { gm: 0.0 };
            let a = solve(&chain, &massless, 1, 5.0)?;
            let b = solve(&chain, &massless, sites - 2, 5.0)?;
            report.massless_deviation = report.massless_deviation.max(analysis::overlap(&a, &b)?.one_minus_m);

            let heavy = MassModel::Newtonian { gm: 1.0 };
            let a = solve(&chain, &heavy, 2, 3.0)?;
            let b = solve(&chain, &heavy, 2, 3.0)?;
            report.identical_deviation = report.identical_deviation.max(analysis::overlap(&a, &b)?.one_minus_m);

            let bare = find_global_ground_state(&HamiltonianSpec::bare(&chain), &opts)?;
            for k in 1..sites / 2 {
                let e1 = solve(&chain, &heavy, k, 2.0)?.energy;
                let e2 = solve(&chain, &heavy, sites - k, 2.0)?.energy;
                let rel = (e1 - e2).abs() / bare.energy.abs().max(f64::MIN_POSITIVE);
                report.mirror_rel_difference = report.mirror_rel_difference.max(rel);
            }
            report.cases += 1;
        }
    }
    report.elapsed = t.elapsed();
    Ok(report)
}

/// Outcome of one named check at its default threshold.
#[derive(Clone, Debug)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The full suite with the default sizes, as run by `oracle-check`.
pub fn run_all(instances: usize, seed: u64) -> Result<Vec<OracleCheck>> {
    let e = lanczos_vs_dense(instances, 10, seed)?;
    let f = free_fermion_vs_many_body(instances.div_ceil(2), 12, seed.wrapping_add(1))?;
    let l = trivial_limits(&[6, 8, 10])?;
    Ok(vec![
        OracleCheck {
            name: "lanczos-vs-dense",
            passed: e.max_rel_energy_error <= 1e-9 && e.min_overlap >= 1.0 - 1e-8,
            detail: format!(
                "{} instances, max rel dE {:.2e}, min overlap 1-{:.2e} over {} ({} degenerate) in {:.1?}",
                e.instances,
                e.max_rel_energy_error,
                1.0 - e.min_overlap,
                e.overlaps_compared,
                e.degenerate,
                e.elapsed
            ),
        },
        OracleCheck {
            name: "free-fermion",
            passed: f.max_energy_error <= 1e-9 && f.max_overlap_error <= 1e-8 && f.filling_mismatches == 0,
            detail: format!(
                "{} instances, max |dE| {:.2e}, max |dM| {:.2e} over {} ({} degenerate) in {:.1?}",
                f.instances, f.max_energy_error, f.max_overlap_error, f.overlaps_compared, f.degenerate, f.elapsed
            ),
        },
        OracleCheck {
            name: "trivial-limits",
            passed: l.massless_deviation <= 1e-12
                && l.identical_deviation <= 1e-12
                && l.mirror_rel_difference <= 1e-9,
            detail: format!(
                "GM=0: 1-M {:.2e}; identical: 1-M {:.2e}; mirror: {:.2e} in {:.1?}",
                l.massless_deviation, l.identical_deviation, l.mirror_rel_difference, l.elapsed
            ),
        },
    ])
}
