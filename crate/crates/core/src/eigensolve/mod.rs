//! Ground states of the redshifted chain.
//!
//! The Hamiltonian conserves total `S^z`, so the global ground state is the
//! lowest of the per-sector minima. Small sectors are diagonalized densely;
//! larger ones go through a loose Lanczos pass first, and only the winning
//! sector is refined to the full residual tolerance.

mod dense;
mod lanczos;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dense::dense_lowest;
pub use lanczos::{lanczos_lowest, lanczos_lowest_from, LanczosResult};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, SectorOperator};
use crate::hilbert::{enumerate_sector_with_limit, StateVector, DEFAULT_MAX_SECTOR_DIM};

/// Sectors at most this large are solved concurrently during a scan.
const PARALLEL_SECTOR_DIM: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Required `||H v - E v||` for the returned ground state.
    pub tolerance: f64,
    /// Residual target for the per-sector energy scan.
    pub scan_tolerance: f64,
    /// Krylov basis size before a thick restart.
    pub max_basis: usize,
    /// Ritz vectors retained across a restart (default: half the basis).
    pub keep: Option<usize>,
    pub max_restarts: usize,
    /// Bytes available for Lanczos vectors; shrinks the basis for huge sectors.
    pub memory_budget: usize,
    /// Seed for the random start vector.
    pub seed: u64,
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
    /// Gaps below `degeneracy_threshold * max(|E|, 1)` flag a degenerate ground state.
    pub degeneracy_threshold: f64,
    pub max_sector_dim: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            scan_tolerance: 1e-6,
            max_basis: 40,
            keep: None,
            max_restarts: 2000,
            memory_budget: 2 << 30,
            seed: 0,
            dense_threshold: 256,
            degeneracy_threshold: 1e-8,
            max_sector_dim: DEFAULT_MAX_SECTOR_DIM,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.scan_tolerance > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.max_basis < 2 {
            return Err(Error::InvalidArgument("Krylov basis needs at least 2 vectors".into()));
        }
        if !(self.degeneracy_threshold >= 0.0) {
            return Err(Error::InvalidArgument("degeneracy threshold must be non-negative".into()));
        }
        Ok(())
    }

    /// Krylov basis size for an operator of dimension `n`, within the memory budget.
    pub fn basis_size(&self, n: usize) -> usize {
        let per_vector = 8 * n.max(1);
        let affordable = (self.memory_budget / per_vector).saturating_sub(3).max(4);
        self.max_basis.min(affordable).min(n).max(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Lanczos,
    Dense,
}

/// Lowest eigenpair of the full chain, with the data needed to trust it.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub vector: StateVector,
    pub n_up: usize,
    /// First excitation within the winning sector (upper bound when from Lanczos).
    pub gap_within: Option<f64>,
    /// Distance to the lowest state of any other sector.
    pub gap_cross: Option<f64>,
    pub runner_up: Option<usize>,
    /// Other sectors whose minimum ties with the winner.
    pub tied_sectors: Vec<usize>,
    pub residual: f64,
    pub tolerance: f64,
    pub method: SolveMethod,
    pub degenerate: bool,
    pub matvecs: usize,
    /// Lowest energy found in each sector, indexed by `n_up`.
    pub sector_energies: Vec<f64>,
}

impl GroundState {
    /// Smallest known gap above the ground state.
    pub fn gap(&self) -> f64 {
        self.gap_within
            .unwrap_or(f64::INFINITY)
            .min(self.gap_cross.unwrap_or(f64::INFINITY))
    }

    pub fn is_converged(&self) -> bool {
        self.residual <= self.tolerance
    }
}

struct SectorSolve {
    n_up: usize,
    energy: f64,
    gap: Option<f64>,
    residual: f64,
    method: SolveMethod,
    vector: Option<Vec<f64>>,
    matvecs: usize,
}

fn solve_sector(spec: &HamiltonianSpec, n_up: usize, opts: &SolverOptions, tol: f64) -> Result<SectorSolve> {
    let basis = Arc::new(enumerate_sector_with_limit(spec.sites(), n_up, opts.max_sector_dim)?);
    if basis.dim() <= opts.dense_threshold {
        let (energy, vector, gap) = dense_lowest(spec, &basis)?;
        return Ok(SectorSolve {
            n_up,
            energy,
            gap,
            residual: 0.0,
            method: SolveMethod::Dense,
            vector: Some(vector),
            matvecs: 0,
        });
    }
    let op = SectorOperator::new(spec, basis)?;
    let scan = SolverOptions { tolerance: tol, ..opts.clone() };
    let r = lanczos_lowest(&op, &scan)?;
    Ok(SectorSolve {
        n_up,
        energy: r.energy,
        gap: r.gap_estimate,
        residual: r.residual,
        method: SolveMethod::Lanczos,
        vector: Some(r.vector),
        matvecs: r.matvecs,
    })
}

/// Scan every `S^z` sector and return the lowest state overall.
pub fn find_global_ground_state(spec: &HamiltonianSpec, opts: &SolverOptions) -> Result<GroundState> {
    opts.validate()?;
    let sites = spec.sites();
    let scan_tol = opts.scan_tolerance.max(opts.tolerance);
    let dims: Vec<usize> = (0..=sites).map(|n| crate::hilbert::binomial(sites, n)).collect();

    let small: Vec<usize> = (0..=sites).filter(|&n| dims[n] <= PARALLEL_SECTOR_DIM).collect();
    let mut solves: Vec<SectorSolve> = small
        .par_iter()
        .map(|&n| solve_sector(spec, n, opts, scan_tol))
        .collect::<Result<_>>()?;

    // Large sectors one at a time; only the best vector so far is kept.
    for n in (0..=sites).filter(|&n| dims[n] > PARALLEL_SECTOR_DIM) {
        let mut s = solve_sector(spec, n, opts, scan_tol)?;
        log::debug!("sector n_up={n} dim={} E={} matvecs={}", dims[n], s.energy, s.matvecs);
        let best = solves.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
        if s.energy < best {
            solves.iter_mut().for_each(|s| s.vector = None);
        } else {
            s.vector = None;
        }
        solves.push(s);
    }
    solves.sort_by_key(|s| s.n_up);

    let scale = |e: f64| opts.degeneracy_threshold * e.abs().max(1.0);
    let min_energy = solves.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
    // ascending scan: the first sector within the tie window wins
    let winner = solves
        .iter()
        .position(|s| s.energy - min_energy <= scale(min_energy))
        .expect("at least one sector");
    let tied_sectors: Vec<usize> = solves
        .iter()
        .filter(|s| s.n_up != winner && s.energy - min_energy <= scale(min_energy))
        .map(|s| s.n_up)
        .collect();
    let sector_energies: Vec<f64> = solves.iter().map(|s| s.energy).collect();
    let scan_matvecs: usize = solves.iter().map(|s| s.matvecs).sum();

    let chosen = &mut solves[winner];
    let basis = Arc::new(enumerate_sector_with_limit(sites, winner, opts.max_sector_dim)?);
    if chosen.method == SolveMethod::Dense && chosen.vector.is_none() {
        *chosen = solve_sector(spec, winner, opts, opts.tolerance)?;
    }
    let (energy, amplitudes, gap_within, residual, method, refine_matvecs) = match chosen.method {
        SolveMethod::Dense => {
            let v = chosen.vector.take().expect("dense solves keep their vector");
            (chosen.energy, v, chosen.gap, chosen.residual, SolveMethod::Dense, 0)
        }
        SolveMethod::Lanczos if chosen.residual <= opts.tolerance && chosen.vector.is_some() => {
            let v = chosen.vector.take().expect("checked above");
            (chosen.energy, v, chosen.gap, chosen.residual, SolveMethod::Lanczos, 0)
        }
        SolveMethod::Lanczos => {
            let start = chosen.vector.take();
            let op = SectorOperator::new(spec, basis.clone())?;
            let r = lanczos_lowest_from(&op, opts, start.as_deref())?;
            (r.energy, r.vector, r.gap_estimate, r.residual, SolveMethod::Lanczos, r.matvecs)
        }
    };

    let runner_up = solves
        .iter()
        .filter(|s| s.n_up != winner)
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .map(|s| s.n_up);
    let gap_cross = runner_up.map(|n| (sector_energies[n] - energy).max(0.0));

    let threshold = scale(energy);
    let degenerate = !tied_sectors.is_empty()
        || gap_within.is_some_and(|g| g < threshold)
        || gap_cross.is_some_and(|g| g < threshold);
    if degenerate {
        log::warn!(
            "degenerate ground state: E = {energy}, within-sector gap {:?}, cross-sector gap {:?}, tied sectors {:?}",
            gap_within,
            gap_cross,
            tied_sectors
        );
    }

    Ok(GroundState {
        energy,
        vector: StateVector::new(basis, amplitudes)?,
        n_up: winner,
        gap_within,
        gap_cross,
        runner_up,
        tied_sectors,
        residual,
        tolerance: opts.tolerance,
        method,
        degenerate,
        matvecs: scan_matvecs + refine_matvecs,
        sector_energies,
    })
}
