//! Thick-restart Lanczos for the lowest eigenpair of a symmetric operator.
//!
//! Every new Krylov vector is orthogonalized against the whole basis (two
//! classical Gram-Schmidt passes), and the projection coefficients fill the
//! Rayleigh-Ritz matrix directly. When the basis is full, the lowest `keep`
//! Ritz vectors and the residual direction seed the next cycle. If the basis
//! budget covers the whole space this reduces to plain Lanczos with full
//! reorthogonalization and terminates exactly.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SolverOptions;
use crate::error::{Error, Result};
use crate::hamiltonian::LinearOperator;
use crate::hilbert::dot;

const CHUNK: usize = 1 << 14;

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Second Ritz value minus the first: an upper bound on the gap in this space.
    pub gap_estimate: Option<f64>,
    /// Explicit `||H v - E v||`.
    pub residual: f64,
    pub matvecs: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// Lowest eigenpair from a seeded random start vector.
pub fn lanczos_lowest<O: LinearOperator + ?Sized>(op: &O, opts: &SolverOptions) -> Result<LanczosResult> {
    lanczos_lowest_from(op, opts, None)
}

/// Lowest eigenpair, optionally warm-started from `start`.
pub fn lanczos_lowest_from<O: LinearOperator + ?Sized>(
    op: &O,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<LanczosResult> {
    opts.validate()?;
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("operator has dimension zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    if n == 1 {
        let mut y = [0.0];
        op.apply(&[1.0], &mut y);
        return Ok(LanczosResult {
            energy: y[0],
            vector: vec![1.0],
            gap_estimate: None,
            residual: 0.0,
            matvecs: 1,
            restarts: 0,
            converged: true,
        });
    }

    let m = opts.basis_size(n);
    let keep = opts.keep.unwrap_or(m / 2).clamp(1, m - 1);

    let mut v0 = match start {
        Some(s) if s.len() == n && s.iter().any(|&x| x != 0.0) => s.to_vec(),
        Some(s) if s.len() != n => return Err(Error::DimensionMismatch { expected: n, found: s.len() }),
        _ => random_vector(n, &mut rng),
    };
    let n0 = norm(&v0);
    scale(&mut v0, 1.0 / n0);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    basis.push(v0);
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut w = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut col = 0;
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut magnitude = 0.0f64;

    loop {
        let mut beta = 0.0;
        while col < m {
            op.apply(&basis[col], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&basis, &mut w);
            for (i, &h) in coeffs.iter().enumerate() {
                t[(i, col)] = h;
                t[(col, i)] = h;
                magnitude = magnitude.max(h.abs());
            }
            beta = norm(&w);
            if col + 1 == m {
                break;
            }
            if beta <= 1e-12 * magnitude.max(1e-300) {
                // Invariant subspace: continue from a fresh direction.
                w = random_vector(n, &mut rng);
                orthogonalize(&basis, &mut w);
                beta = 0.0;
                let nw = norm(&w);
                scale(&mut w, 1.0 / nw);
                basis.push(std::mem::take(&mut w));
                w = vec![0.0; n];
            } else {
                let mut next = w.clone();
                scale(&mut next, 1.0 / beta);
                basis.push(next);
            }
            col += 1;
        }

        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = |i: usize| eig.eigenvalues[order[i]];
        let ritz_coeffs = |i: usize| eig.eigenvectors.column(order[i]);
        let gap_estimate = Some(theta(1) - theta(0));
        let estimate = beta * ritz_coeffs(0)[m - 1].abs();

        let exhausted = restarts >= opts.max_restarts;
        if estimate <= opts.tolerance || exhausted {
            let mut y = combine(&basis, ritz_coeffs(0).as_slice());
            let ny = norm(&y);
            scale(&mut y, 1.0 / ny);
            fix_sign(&mut y);
            op.apply(&y, &mut scratch);
            matvecs += 1;
            let energy = dot(&y, &scratch);
            let residual = residual_norm(&scratch, &y, energy);
            let result = LanczosResult {
                energy,
                vector: y,
                gap_estimate,
                residual,
                matvecs,
                restarts,
                converged: residual <= opts.tolerance,
            };
            if result.converged {
                return Ok(result);
            }
            if exhausted {
                return Err(Error::NoConvergence { best: Box::new(result) });
            }
        }

        // Thick restart: rotate the basis onto the lowest Ritz vectors.
        let mut s = DMatrix::<f64>::zeros(m, keep);
        for i in 0..keep {
            s.set_column(i, &ritz_coeffs(i));
        }
        rotate_basis(&mut basis, &s);
        let mut resid = std::mem::take(&mut w);
        scale(&mut resid, 1.0 / beta);
        basis.push(resid);
        w = vec![0.0; n];

        t.fill(0.0);
        for i in 0..keep {
            t[(i, i)] = theta(i);
            let coupling = beta * ritz_coeffs(i)[m - 1];
            t[(i, keep)] = coupling;
            t[(keep, i)] = coupling;
        }
        col = keep;
        restarts += 1;
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn scale(x: &mut [f64], a: f64) {
    x.par_chunks_mut(CHUNK).for_each(|c| c.iter_mut().for_each(|v| *v *= a));
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += a * xi));
}

/// Removes the span of `basis` from `w`; returns the accumulated projections.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut total = vec![0.0; basis.len()];
    for _ in 0..2 {
        let c: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, &ci) in basis.iter().zip(&c) {
            axpy(-ci, v, w);
        }
        total.iter_mut().zip(&c).for_each(|(t, ci)| *t += ci);
    }
    total
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let n = basis[0].len();
    let mut y = vec![0.0; n];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut y);
    }
    y
}

/// In place `V <- V S`, keeping only the columns of `S`.
fn rotate_basis(basis: &mut Vec<Vec<f64>>, s: &DMatrix<f64>) {
    let (m, k) = s.shape();
    let n = basis[0].len();
    let mut old = vec![0.0; m];
    for r in 0..n {
        for (j, v) in basis.iter().enumerate() {
            old[j] = v[r];
        }
        for i in 0..k {
            let col = s.column(i);
            basis[i][r] = old.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
        }
    }
    basis.truncate(k);
}

fn residual_norm(hy: &[f64], y: &[f64], energy: f64) -> f64 {
    let partial: Vec<f64> = hy
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - energy * q).powi(2)).sum::<f64>())
        .collect();
    partial.iter().sum::<f64>().sqrt()
}

/// Largest-magnitude amplitude made positive (first one on ties).
pub(crate) fn fix_sign(y: &mut [f64]) {
    let mut pivot = 0;
    for (i, v) in y.iter().enumerate() {
        if v.abs() > y[pivot].abs() {
            pivot = i;
        }
    }
    if y[pivot] < 0.0 {
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::*;
    use crate::hamiltonian::{dense_matrix, HamiltonianSpec, SectorOperator};
    use crate::hilbert::enumerate_sector;
    use crate::model::ChainSpec;

    struct Diagonal(Vec<f64>);

    impl LinearOperator for Diagonal {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    struct Dense(DMatrix<f64>);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let out = &self.0 * DVector::from_column_slice(x);
            y.copy_from_slice(out.as_slice());
        }
    }

    #[test]
    fn diagonal_operator() {
        let r = lanczos_lowest(&Diagonal(vec![3.0, 1.0, 2.0]), &SolverOptions::default()).unwrap();
        assert!((r.energy - 1.0).abs() < 1e-12);
        assert!((r.vector[1].abs() - 1.0).abs() < 1e-12);
        assert!(r.vector[1] > 0.0);
        assert!((r.gap_estimate.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_xx() {
        let spec = HamiltonianSpec::bare(&ChainSpec::xx(2).unwrap());
        let op = SectorOperator::new(&spec, Arc::new(enumerate_sector(2, 1).unwrap())).unwrap();
        let r = lanczos_lowest(&op, &SolverOptions::default()).unwrap();
        assert!((r.energy + 0.5).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.vector[0].abs() - s).abs() < 1e-12 && (r.vector[1].abs() - s).abs() < 1e-12);
        assert!(r.vector[0] * r.vector[1] < 0.0);
    }

    #[test]
    fn restarted_run_matches_dense() {
        let chain = ChainSpec::uniform(12, 1.0, 0.8, 0.3).unwrap();
        let spec = HamiltonianSpec::bare(&chain);
        let basis = Arc::new(enumerate_sector(12, 6).unwrap());
        let h = dense_matrix(&spec, &basis).unwrap();
        let exact = h.clone().symmetric_eigenvalues().min();

        let op = SectorOperator::new(&spec, basis).unwrap();
        let opts = SolverOptions { max_basis: 12, ..Default::default() };
        let r = lanczos_lowest(&op, &opts).unwrap();
        assert!(r.restarts > 0, "small basis should force restarts");
        assert!(r.converged && r.residual <= 1e-10);
        assert!((r.energy - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn degenerate_start_recovers_via_fresh_direction() {
        // block-diagonal operator; the start vector lives in the upper block only
        let mut m = DMatrix::zeros(6, 6);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 3.0;
        m[(0, 1)] = 0.5;
        m[(1, 0)] = 0.5;
        for i in 2..6 {
            m[(i, i)] = -1.0 - i as f64;
        }
        let start = [1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let r = lanczos_lowest_from(&Dense(m), &SolverOptions::default(), Some(&start)).unwrap();
        assert!((r.energy + 6.0).abs() < 1e-12);
    }

    #[test]
    fn exhausted_restarts_report_best_iterate() {
        let chain = ChainSpec::uniform(12, 1.0, 1.0, 0.0).unwrap();
        let spec = HamiltonianSpec::bare(&chain);
        let op = SectorOperator::new(&spec, Arc::new(enumerate_sector(12, 6).unwrap())).unwrap();
        let opts = SolverOptions { max_basis: 4, max_restarts: 1, ..Default::default() };
        match lanczos_lowest(&op, &opts) {
            Err(Error::NoConvergence { best }) => {
                assert!(!best.converged);
                assert!(best.residual > opts.tolerance);
                assert_eq!(best.vector.len(), 924);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn seed_determinism() {
        let chain = ChainSpec::uniform(10, 1.0, 0.5, 0.2).unwrap();
        let spec = HamiltonianSpec::bare(&chain);
        let op = SectorOperator::new(&spec, Arc::new(enumerate_sector(10, 5).unwrap())).unwrap();
        let opts = SolverOptions { max_basis: 16, ..Default::default() };
        let a = lanczos_lowest(&op, &opts).unwrap();
        let b = lanczos_lowest(&op, &opts).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.vector, b.vector);
    }
}
