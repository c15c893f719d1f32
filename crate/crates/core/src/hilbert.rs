//! Fixed-magnetization sectors of the spin-1/2 chain.
//!
//! A configuration is an `L`-bit word; bit `i - 1` set means site `i` is up.
//! Each sector holds every configuration with `n_up` set bits in ascending
//! integer order. Lookup uses a split table: the high and low halves of the
//! word index into two small tables, so `index = start[hi] + rank[lo]`.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest chain the `u32` configuration words support here.
pub const MAX_SITES: usize = 30;

/// Default cap on sector dimension (about 0.4 GB per amplitude vector).
pub const DEFAULT_MAX_SECTOR_DIM: usize = 50_000_000;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}

#[derive(Debug)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    states: Vec<u32>,
    lo_bits: u32,
    lo_mask: u32,
    lo_rank: Vec<u32>,
    hi_start: Vec<u32>,
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u32 {
        self.states[index]
    }

    /// Index of a configuration known to lie in this sector.
    #[inline]
    pub fn index_unchecked(&self, state: u32) -> usize {
        let hi = (state >> self.lo_bits) as usize;
        let lo = (state & self.lo_mask) as usize;
        self.hi_start[hi] as usize + self.lo_rank[lo] as usize
    }

    pub fn index_of(&self, state: u32) -> Option<usize> {
        if (state as u64) >> self.sites != 0 || state.count_ones() as usize != self.n_up {
            return None;
        }
        Some(self.index_unchecked(state))
    }

    /// Total `S^z` of the sector.
    pub fn magnetization(&self) -> f64 {
        self.n_up as f64 - self.sites as f64 / 2.0
    }
}

/// Enumerate the sector with `n_up` up spins out of `sites`, under the default dimension cap.
pub fn enumerate_sector(sites: usize, n_up: usize) -> Result<SectorBasis> {
    enumerate_sector_with_limit(sites, n_up, DEFAULT_MAX_SECTOR_DIM)
}

pub fn enumerate_sector_with_limit(sites: usize, n_up: usize, max_dim: usize) -> Result<SectorBasis> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::InvalidChain(format!("sector enumeration supports 1..={MAX_SITES} sites, got {sites}")));
    }
    if n_up > sites {
        return Err(Error::InvalidArgument(format!("n_up = {n_up} exceeds L = {sites}")));
    }
    let dim = binomial(sites, n_up);
    if dim > max_dim {
        return Err(Error::SectorTooLarge { dim, limit: max_dim });
    }

    let mut states = Vec::with_capacity(dim);
    if n_up == 0 {
        states.push(0);
    } else {
        // Gosper's hack walks same-popcount words in ascending order.
        let last = ((1u64 << n_up) - 1) << (sites - n_up);
        let mut s = (1u64 << n_up) - 1;
        loop {
            states.push(s as u32);
            if s == last {
                break;
            }
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    debug_assert_eq!(states.len(), dim);

    let lo_bits = sites.div_ceil(2) as u32;
    let hi_bits = sites as u32 - lo_bits;
    let lo_mask = ((1u64 << lo_bits) - 1) as u32;

    let mut seen = vec![0u32; lo_bits as usize + 1];
    let lo_rank = (0..1u32 << lo_bits)
        .map(|lo| {
            let p = lo.count_ones() as usize;
            let r = seen[p];
            seen[p] += 1;
            r
        })
        .collect();

    let mut next = 0usize;
    let hi_start = (0..1u32 << hi_bits)
        .map(|hi| {
            let start = next;
            let p = hi.count_ones() as usize;
            if p <= n_up {
                next += binomial(lo_bits as usize, n_up - p);
            }
            start as u32
        })
        .collect();
    debug_assert_eq!(next, dim);

    Ok(SectorBasis { sites, n_up, states, lo_bits, lo_mask, lo_rank, hi_start })
}

/// Real amplitudes over one sector.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn new(basis: Arc<SectorBasis>, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amplitudes.len() });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let amplitudes = vec![0.0; basis.dim()];
        Self { basis, amplitudes }
    }

    /// Basis vector `|states[index]>`.
    pub fn unit(basis: Arc<SectorBasis>, index: usize) -> Self {
        let mut v = Self::zeros(basis);
        v.amplitudes[index] = 1.0;
        v
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        dot(&self.amplitudes, &self.amplitudes).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.is_finite())
    }

    /// Dump as little-endian binary: `L: u32`, `n_up: u32`, `dim: u64`, then `dim` f64 amplitudes.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.basis.sites() as u32).to_le_bytes())?;
        out.write_all(&(self.basis.n_up() as u32).to_le_bytes())?;
        out.write_all(&(self.basis.dim() as u64).to_le_bytes())?;
        for a in &self.amplitudes {
            out.write_all(&a.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut input: R) -> Result<Self> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        let sites = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b4)?;
        let n_up = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b8)?;
        let dim = u64::from_le_bytes(b8) as usize;
        let basis = Arc::new(enumerate_sector(sites, n_up)?);
        if basis.dim() != dim {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: dim });
        }
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            input.read_exact(&mut b8)?;
            amplitudes.push(f64::from_le_bytes(b8));
        }
        Self::new(basis, amplitudes)
    }
}

/// `<u|v>`; zero across different sectors.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<f64> {
    let (bu, bv) = (u.basis(), v.basis());
    if bu.sites() != bv.sites() || bu.n_up() != bv.n_up() {
        return Ok(0.0);
    }
    if u.amplitudes.len() != v.amplitudes.len() {
        return Err(Error::DimensionMismatch { expected: u.amplitudes.len(), found: v.amplitudes.len() });
    }
    Ok(dot(&u.amplitudes, &v.amplitudes))
}

const REDUCE_CHUNK: usize = 1 << 14;

/// Dot product with a fixed reduction order, independent of the thread count.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    use rayon::prelude::*;
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= REDUCE_CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partial: Vec<f64> = a
        .par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_half_filling() {
        let b = enumerate_sector(2, 1).unwrap();
        assert_eq!(b.states(), &[0b01, 0b10]);
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn four_site_half_filling() {
        assert_eq!(enumerate_sector(4, 2).unwrap().dim(), 6);
    }

    #[test]
    fn largest_figure_sector_dimension() {
        // C(26, 13), computed independently
        assert_eq!(binomial(26, 13), 10_400_600);
    }

    #[test]
    fn empty_and_full_sectors() {
        let b = enumerate_sector(5, 0).unwrap();
        assert_eq!(b.states(), &[0]);
        assert_eq!(b.index_of(0), Some(0));
        let b = enumerate_sector(5, 5).unwrap();
        assert_eq!(b.states(), &[0b11111]);
        assert_eq!(b.index_of(0b11111), Some(0));
    }

    #[test]
    fn lookup_round_trip_and_order() {
        for sites in 1..=12 {
            for n_up in 0..=sites {
                let b = enumerate_sector(sites, n_up).unwrap();
                assert_eq!(b.dim(), binomial(sites, n_up));
                assert!(b.states().windows(2).all(|w| w[0] < w[1]));
                for (j, &s) in b.states().iter().enumerate() {
                    assert_eq!(s.count_ones() as usize, n_up);
                    assert_eq!(b.index_of(s), Some(j));
                }
            }
        }
    }

    #[test]
    fn sectors_cover_the_full_space() {
        for sites in 1..=20 {
            let total: usize = (0..=sites).map(|n| enumerate_sector(sites, n).unwrap().dim()).sum();
            assert_eq!(total, 1 << sites);
        }
    }

    #[test]
    fn lookup_rejects_foreign_states() {
        let b = enumerate_sector(6, 3).unwrap();
        assert_eq!(b.index_of(0b11), None);
        assert_eq!(b.index_of(0b1_000_011), None);
    }

    #[test]
    fn too_large_sector() {
        let err = enumerate_sector_with_limit(20, 10, 1000).unwrap_err();
        assert!(matches!(err, Error::SectorTooLarge { dim: 184_756, limit: 1000 }));
    }

    #[test]
    fn inner_products() {
        let b = Arc::new(enumerate_sector(4, 2).unwrap());
        let mut v = StateVector::new(b.clone(), vec![1.0, 2.0, 0.0, -1.0, 0.5, 3.0]).unwrap();
        v.normalize();
        assert!((inner(&v, &v).unwrap() - 1.0).abs() < 1e-15);

        let e0 = StateVector::unit(b.clone(), 0);
        let e1 = StateVector::unit(b.clone(), 1);
        assert_eq!(inner(&e0, &e1).unwrap(), 0.0);

        let other = Arc::new(enumerate_sector(4, 1).unwrap());
        let w = StateVector::unit(other, 0);
        assert_eq!(inner(&v, &w).unwrap(), 0.0);
    }

    #[test]
    fn state_vector_length_checked() {
        let b = Arc::new(enumerate_sector(4, 2).unwrap());
        assert!(matches!(
            StateVector::new(b, vec![0.0; 5]),
            Err(Error::DimensionMismatch { expected: 6, found: 5 })
        ));
    }

    #[test]
    fn dump_round_trip() {
        let b = Arc::new(enumerate_sector(6, 2).unwrap());
        let amps: Vec<f64> = (0..b.dim()).map(|i| (i as f64).sin()).collect();
        let v = StateVector::new(b, amps).unwrap();
        let mut buf = Vec::new();
        v.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * 15);
        assert_eq!(&buf[..4], &6u32.to_le_bytes());
        let back = StateVector::read_dump(buf.as_slice()).unwrap();
        assert_eq!(back.amplitudes(), v.amplitudes());
        assert_eq!(back.basis().n_up(), 2);
    }

    #[test]
    fn chunked_dot_matches_naive() {
        let a: Vec<f64> = (0..100_000i64).map(|i| ((i * 7919) % 1000) as f64 / 1000.0 - 0.5).collect();
        let b: Vec<f64> = (0..100_000i64).map(|i| ((i * 104_729) % 997) as f64 / 997.0 - 0.5).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
    }
}
