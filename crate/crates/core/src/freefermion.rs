//! Jordan-Wigner solution of the XX chain.
//!
//! With `Jz = 0` the chain maps onto spinless fermions hopping with amplitude
//! `jx[i] / 2` in the on-site potential `-b[i]`. Since `S^z_i = n_i - 1/2`,
//! the field term leaves a constant `+ sum_i b[i] / 2` that the many-body
//! energy carries. The ground state fills every negative single-particle
//! level, and two Fermi seas with equal filling overlap by `|det(A^T B)|`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::model::{ChainSpec, RedshiftProfile};

/// Single-particle Hamiltonian plus the scalar left over from the mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleH {
    matrix: DMatrix<f64>,
    offset: f64,
}

impl SingleParticleH {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `sum_i b_eff[i] / 2`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_single_particle(chain: &ChainSpec, profile: &RedshiftProfile) -> Result<SingleParticleH> {
    single_particle_from_spec(&HamiltonianSpec::new(chain, profile)?)
}

pub fn single_particle_from_spec(spec: &HamiltonianSpec) -> Result<SingleParticleH> {
    let jz = spec.chain().jz();
    if jz != 0.0 {
        return Err(Error::NotFreeFermion(jz));
    }
    let n = spec.sites();
    let mut matrix = DMatrix::zeros(n, n);
    for (i, b) in spec.b_eff().iter().enumerate() {
        matrix[(i, i)] = -b;
    }
    for (i, j) in spec.jx_eff().iter().enumerate() {
        matrix[(i, i + 1)] = j / 2.0;
        matrix[(i + 1, i)] = j / 2.0;
    }
    let offset = spec.b_eff().iter().sum::<f64>() / 2.0;
    Ok(SingleParticleH { matrix, offset })
}

/// Filled negative-energy orbitals.
#[derive(Clone, Debug)]
pub struct FermiSea {
    orbitals: DMatrix<f64>,
    energies: Vec<f64>,
    offset: f64,
    zero_modes: usize,
}

impl FermiSea {
    /// Occupied orbitals as columns, ascending in energy.
    pub fn orbitals(&self) -> &DMatrix<f64> {
        &self.orbitals
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn filled(&self) -> usize {
        self.energies.len()
    }

    /// Levels at zero energy; any makes the many-body ground state degenerate.
    pub fn zero_modes(&self) -> usize {
        self.zero_modes
    }

    pub fn is_degenerate(&self) -> bool {
        self.zero_modes > 0
    }

    /// Many-body ground-state energy, including the mapping constant.
    pub fn energy(&self) -> f64 {
        self.energies.iter().sum::<f64>() + self.offset
    }

    pub fn sites(&self) -> usize {
        self.orbitals.nrows()
    }
}

pub fn fill_ground_state(h: &SingleParticleH) -> FermiSea {
    let eig = SymmetricEigen::new(h.matrix.clone());
    let mut order: Vec<usize> = (0..h.sites()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = h.matrix.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let zero_tol = 1e-12 * scale;
    let zero_modes = order.iter().filter(|&&i| eig.eigenvalues[i].abs() <= zero_tol).count();
    if zero_modes > 0 {
        log::warn!("{zero_modes} zero-energy single-particle mode(s); the Fermi sea is not unique");
    }
    let occupied: Vec<usize> = order.into_iter().filter(|&i| eig.eigenvalues[i] < -zero_tol).collect();

    let mut orbitals = DMatrix::zeros(h.sites(), occupied.len());
    for (c, &i) in occupied.iter().enumerate() {
        orbitals.set_column(c, &eig.eigenvectors.column(i));
    }
    let energies = occupied.iter().map(|&i| eig.eigenvalues[i]).collect();
    FermiSea { orbitals, energies, offset: h.offset, zero_modes }
}

/// `|<a|b>|` for two Fermi seas; zero when the particle numbers differ.
pub fn slater_overlap(a: &FermiSea, b: &FermiSea) -> Result<f64> {
    if a.sites() != b.sites() {
        return Err(Error::DimensionMismatch { expected: a.sites(), found: b.sites() });
    }
    if a.filled() != b.filled() {
        return Ok(0.0);
    }
    if a.filled() == 0 {
        return Ok(1.0);
    }
    let gram = a.orbitals.transpose() * &b.orbitals;
    Ok(gram.determinant().abs())
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn two_site_matrix() {
        let h = build_single_particle(&ChainSpec::xx(2).unwrap(), &RedshiftProfile::identity(2)).unwrap();
        assert_eq!(h.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        let sea = fill_ground_state(&h);
        assert_eq!(sea.filled(), 1);
        assert!((sea.energies()[0] + 0.5).abs() < 1e-15);
        assert!((sea.energy() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn interacting_chain_is_rejected() {
        let err = build_single_particle(&ChainSpec::xxz(4).unwrap(), &RedshiftProfile::identity(4)).unwrap_err();
        assert!(matches!(err, Error::NotFreeFermion(_)));
    }

    #[test]
    fn field_pushes_a_level_through_zero() {
        // levels -b ± 1/2: for 0 < b < 1/2 one is filled, for b > 1/2 both are
        let fill = |b: f64| {
            let chain = ChainSpec::uniform(2, 1.0, 0.0, b).unwrap();
            fill_ground_state(&build_single_particle(&chain, &RedshiftProfile::identity(2)).unwrap())
        };
        assert_eq!(fill(0.25).filled(), 1);
        assert_eq!(fill(0.75).filled(), 2);
        let critical = fill(0.5);
        assert_eq!(critical.filled(), 1);
        assert!(critical.is_degenerate());
    }

    #[test]
    fn scaling_preserves_filling_and_orbitals() {
        let chain = ChainSpec::uniform(8, 1.0, 0.0, 0.2).unwrap();
        let base = RedshiftProfile::identity(8);
        let a = fill_ground_state(&build_single_particle(&chain, &base).unwrap());
        let b = fill_ground_state(&build_single_particle(&chain, &base.scaled(0.4)).unwrap());
        assert_eq!(a.filled(), b.filled());
        assert!((slater_overlap(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_and_cross_filling_overlaps() {
        let chain = ChainSpec::xx(10).unwrap();
        let a = fill_ground_state(&build_single_particle(&chain, &RedshiftProfile::identity(10)).unwrap());
        assert!((slater_overlap(&a, &a).unwrap() - 1.0).abs() < 1e-12);

        let field = ChainSpec::uniform(10, 1.0, 0.0, 0.6).unwrap();
        let b = fill_ground_state(&build_single_particle(&field, &RedshiftProfile::identity(10)).unwrap());
        assert_ne!(a.filled(), b.filled());
        assert_eq!(slater_overlap(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn overlap_is_invariant_under_orbital_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let chain = ChainSpec::xx(10).unwrap();
        let site = (0..10).map(|_| rng.gen_range(0.5..1.0)).collect();
        let bond = (0..9).map(|_| rng.gen_range(0.5..1.0)).collect();
        let p = RedshiftProfile::from_factors(site, bond).unwrap();
        let a = fill_ground_state(&build_single_particle(&chain, &RedshiftProfile::identity(10)).unwrap());
        let b = fill_ground_state(&build_single_particle(&chain, &p).unwrap());
        let reference = slater_overlap(&a, &b).unwrap();

        let n = b.filled();
        let random = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let q = random.qr().q();
        let rotated = FermiSea { orbitals: b.orbitals() * q, ..b.clone() };
        assert!((slater_overlap(&a, &rotated).unwrap() - reference).abs() < 1e-10);
    }
}
