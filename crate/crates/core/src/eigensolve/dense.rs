use nalgebra::SymmetricEigen;

use super::lanczos::fix_sign;
use crate::error::Result;
use crate::hamiltonian::{dense_matrix, HamiltonianSpec};
use crate::hilbert::SectorBasis;

/// Lowest eigenpair of a sector by full diagonalization: `(energy, vector, gap)`.
pub fn dense_lowest(spec: &HamiltonianSpec, basis: &SectorBasis) -> Result<(f64, Vec<f64>, Option<f64>)> {
    let h = dense_matrix(spec, basis)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lowest = order[0];
    let mut vector: Vec<f64> = eig.eigenvectors.column(lowest).iter().copied().collect();
    fix_sign(&mut vector);
    let gap = order.get(1).map(|&i| eig.eigenvalues[i] - eig.eigenvalues[lowest]);
    Ok((eig.eigenvalues[lowest], vector, gap))
}
