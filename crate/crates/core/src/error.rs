use std::path::PathBuf;

use thiserror::Error;

use crate::eigensolve::LanczosResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    #[error("invalid mass model: {0}")]
    InvalidMass(String),

    #[error("distance from the mass to {term} {index} is zero")]
    NonPositiveDistance { term: &'static str, index: usize },

    #[error("redshift factor {factor} on {term} {index} is outside [0, 1]; the first-order expansion no longer holds")]
    FactorOutOfRange {
        term: &'static str,
        index: usize,
        factor: f64,
    },

    #[error("sector of dimension {dim} exceeds the configured limit of {limit}")]
    SectorTooLarge { dim: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Lanczos did not converge: residual {:.3e} after {} matvecs", .best.residual, .best.matvecs)]
    NoConvergence { best: Box<LanczosResult> },

    #[error("chain has Jz = {0}; the free-fermion mapping requires Jz = 0")]
    NotFreeFermion(f64),

    #[error("visibility {0} shows no decoherence (M >= 1)")]
    NoDecoherence(f64),

    #[error("visibility {0} shows total decoherence (M <= 0)")]
    TotalDecoherence(f64),

    #[error("ground state is not converged (residual {residual:.3e} > tolerance {tolerance:.3e})")]
    UnconvergedInput { residual: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("CSV schema mismatch in {path}: {detail}")]
    SchemaMismatch { path: PathBuf, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::UnconvergedInput { .. }
        )
    }
}
