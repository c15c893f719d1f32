//! Redshifted XXZ Hamiltonian on a fixed-magnetization sector.
//!
//! Spin operators are `S = sigma / 2`. With per-bond couplings `jx[i]`,
//! `jz[i]` and per-site fields `b[i]` (already multiplied by their redshift
//! factors), the matrix elements in the configuration basis are
//!
//! * diagonal: `sum_i jz[i] s_i s_{i+1} - sum_i b[i] s_i` with `s_i = ±1/2`;
//! * off-diagonal: `jx[i] / 2` between configurations related by swapping
//!   antiparallel spins on bond `i`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{SectorBasis, StateVector};
use crate::model::{ChainSpec, RedshiftProfile};

/// Largest sector `dense_matrix` builds unless told otherwise.
pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

const ROW_CHUNK: usize = 4096;

/// Effective couplings of the redshifted chain.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    chain: ChainSpec,
    profile: RedshiftProfile,
    jx_eff: Vec<f64>,
    jz_eff: Vec<f64>,
    b_eff: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(chain: &ChainSpec, profile: &RedshiftProfile) -> Result<Self> {
        if profile.sites() != chain.sites() {
            return Err(Error::DimensionMismatch { expected: chain.sites(), found: profile.sites() });
        }
        let jx_eff = profile.bond_factors().iter().map(|f| chain.jx() * f).collect();
        let jz_eff = profile.bond_factors().iter().map(|f| chain.jz() * f).collect();
        let b_eff = chain
            .fields()
            .iter()
            .zip(profile.site_factors())
            .map(|(b, f)| b * f)
            .collect();
        Ok(Self { chain: chain.clone(), profile: profile.clone(), jx_eff, jz_eff, b_eff })
    }

    /// The chain without any gravitating mass.
    pub fn bare(chain: &ChainSpec) -> Self {
        Self::new(chain, &RedshiftProfile::identity(chain.sites())).expect("identity profile matches the chain")
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn profile(&self) -> &RedshiftProfile {
        &self.profile
    }

    pub fn sites(&self) -> usize {
        self.chain.sites()
    }

    pub fn jx_eff(&self) -> &[f64] {
        &self.jx_eff
    }

    pub fn jz_eff(&self) -> &[f64] {
        &self.jz_eff
    }

    pub fn b_eff(&self) -> &[f64] {
        &self.b_eff
    }

    /// Reflected chain and profile.
    pub fn mirrored(&self) -> Self {
        Self::new(&self.chain.mirrored(), &self.profile.mirrored()).expect("mirroring preserves lengths")
    }

    /// Diagonal matrix element of a configuration.
    pub fn diagonal(&self, state: u32) -> f64 {
        let spin = |i: usize| if state >> i & 1 == 1 { 0.5 } else { -0.5 };
        let ising: f64 = self.jz_eff.iter().enumerate().map(|(i, j)| j * spin(i) * spin(i + 1)).sum();
        let field: f64 = self.b_eff.iter().enumerate().map(|(i, b)| b * spin(i)).sum();
        ising - field
    }

    /// Bound on the spectral radius from the coupling magnitudes.
    pub fn norm_bound(&self) -> f64 {
        let bonds: f64 = self.jx_eff.iter().zip(&self.jz_eff).map(|(x, z)| x.abs() / 2.0 + z.abs() / 4.0).sum();
        let fields: f64 = self.b_eff.iter().map(|b| b.abs() / 2.0).sum();
        bonds + fields
    }
}

/// A real symmetric operator applied matrix-free.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// The Hamiltonian restricted to one sector, with its diagonal cached.
pub struct SectorOperator {
    basis: Arc<SectorBasis>,
    diag: Vec<f64>,
    hop: Vec<f64>,
    bond_mask: u32,
}

impl SectorOperator {
    pub fn new(spec: &HamiltonianSpec, basis: Arc<SectorBasis>) -> Result<Self> {
        if basis.sites() != spec.sites() {
            return Err(Error::DimensionMismatch { expected: spec.sites(), found: basis.sites() });
        }
        let diag = basis.states().par_iter().map(|&s| spec.diagonal(s)).collect();
        let hop = spec.jx_eff.iter().map(|j| j / 2.0).collect();
        let bond_mask = ((1u64 << spec.chain.bonds()) - 1) as u32;
        Ok(Self { basis, diag, hop, bond_mask })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    fn row(&self, j: usize, x: &[f64]) -> f64 {
        let s = self.basis.state(j);
        let mut acc = self.diag[j] * x[j];
        // bit i marks bond i+1 with antiparallel spins
        let mut flips = (s ^ (s >> 1)) & self.bond_mask;
        while flips != 0 {
            let i = flips.trailing_zeros();
            let t = s ^ (0b11 << i);
            acc += self.hop[i as usize] * x[self.basis.index_unchecked(t)];
            flips &= flips - 1;
        }
        acc
    }
}

impl LinearOperator for SectorOperator {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        // Each output row is a gather over its own neighbours, so rows are
        // independent and the result does not depend on scheduling.
        y.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(c, out)| {
            let base = c * ROW_CHUNK;
            for (r, slot) in out.iter_mut().enumerate() {
                *slot = self.row(base + r, x);
            }
        });
    }
}

/// `H v` within the sector of `v`.
pub fn apply(spec: &HamiltonianSpec, v: &StateVector) -> Result<StateVector> {
    let op = SectorOperator::new(spec, v.basis().clone())?;
    let mut out = StateVector::zeros(v.basis().clone());
    op.apply(v.amplitudes(), out.amplitudes_mut());
    Ok(out)
}

/// Dense sector matrix, for small sectors only.
pub fn dense_matrix(spec: &HamiltonianSpec, basis: &SectorBasis) -> Result<DMatrix<f64>> {
    dense_matrix_with_limit(spec, basis, DEFAULT_DENSE_LIMIT)
}

pub fn dense_matrix_with_limit(spec: &HamiltonianSpec, basis: &SectorBasis, limit: usize) -> Result<DMatrix<f64>> {
    if basis.sites() != spec.sites() {
        return Err(Error::DimensionMismatch { expected: spec.sites(), found: basis.sites() });
    }
    let dim = basis.dim();
    if dim > limit {
        return Err(Error::SectorTooLarge { dim, limit });
    }
    let mut h = DMatrix::zeros(dim, dim);
    for (col, &s) in basis.states().iter().enumerate() {
        h[(col, col)] = spec.diagonal(s);
        for bond in 0..spec.chain.bonds() {
            let pair = s >> bond & 0b11;
            if pair == 0b01 || pair == 0b10 {
                let row = basis
                    .index_of(s ^ (0b11 << bond))
                    .expect("spin exchange stays in the sector");
                h[(row, col)] += spec.jx_eff[bond] / 2.0;
            }
        }
    }
    Ok(h)
}
