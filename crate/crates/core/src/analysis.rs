//! Decoherence figures derived from pairs of ground states.

use crate::eigensolve::GroundState;
use crate::error::{Error, Result};
use crate::hilbert::{dot, StateVector};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m / s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Target visibility used when none is given.
pub fn default_alpha() -> f64 {
    (-1.0f64).exp()
}

/// Visibility of the mass superposition and the derived distinguishabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapResult {
    /// `|<GS_1|GS_2>|`.
    pub m: f64,
    /// `1 - M`, computed without cancellation.
    pub one_minus_m: f64,
    /// Which-way distinguishability `sqrt(1 - M^2)`.
    pub distinguishability: f64,
    /// Either ground state is degenerate; `m` depends on the basis choice.
    pub degenerate: bool,
    pub sectors_match: bool,
}

impl OverlapResult {
    fn from_one_minus(one_minus_m: f64, degenerate: bool, sectors_match: bool) -> Self {
        let one_minus_m = one_minus_m.clamp(0.0, 1.0);
        Self {
            m: 1.0 - one_minus_m,
            one_minus_m,
            // 1 - M^2 = (1 - M)(1 + M)
            distinguishability: (one_minus_m * (2.0 - one_minus_m)).sqrt(),
            degenerate,
            sectors_match,
        }
    }

    /// Overlap that the caller should not rely on.
    pub fn is_trusted(&self) -> bool {
        !self.degenerate
    }
}

/// `1 - |<u|v>| / (|u| |v|)` from the difference vector, accurate when the states nearly coincide.
pub fn one_minus_overlap(u: &[f64], v: &[f64]) -> f64 {
    let (nu, nv) = (dot(u, u).sqrt(), dot(v, v).sqrt());
    let sign = if dot(u, v) < 0.0 { -1.0 } else { 1.0 };
    let diff: f64 = u.iter().zip(v).map(|(a, b)| (a - sign * b).powi(2)).sum();
    (diff - (nu - nv).powi(2)) / (2.0 * nu * nv)
}

pub fn vector_overlap(u: &StateVector, v: &StateVector) -> OverlapResult {
    let (bu, bv) = (u.basis(), v.basis());
    if bu.sites() != bv.sites() || bu.n_up() != bv.n_up() {
        return OverlapResult::from_one_minus(1.0, false, false);
    }
    OverlapResult::from_one_minus(one_minus_overlap(u.amplitudes(), v.amplitudes()), false, true)
}

/// Visibility between the chain's ground states for the two mass positions.
pub fn overlap(g1: &GroundState, g2: &GroundState) -> Result<OverlapResult> {
    for g in [g1, g2] {
        if !g.is_converged() {
            return Err(Error::UnconvergedInput { residual: g.residual, tolerance: g.tolerance });
        }
    }
    if g1.vector.basis().sites() != g2.vector.basis().sites() {
        return Err(Error::DimensionMismatch {
            expected: g1.vector.basis().sites(),
            found: g2.vector.basis().sites(),
        });
    }
    let mut r = vector_overlap(&g1.vector, &g2.vector);
    r.degenerate = g1.degenerate || g2.degenerate;
    Ok(r)
}

/// Visibility left after `count` independent copies: `M^count`.
pub fn composite_visibility(m: f64, count: u64) -> f64 {
    m.powf(count as f64)
}

/// Product of heterogeneous per-system visibilities.
pub fn product_visibility(visibilities: &[f64]) -> f64 {
    visibilities.iter().product()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DofBound {
    /// `ln(alpha) / ln(M)`.
    pub n: f64,
    /// `1 / (1 - M)`, the small-δ approximation (scaled by `-ln alpha`).
    pub small_delta: f64,
    /// `|small_delta - n| / n`.
    pub relative_difference: f64,
}

impl DofBound {
    pub fn approximation_within(&self, rel: f64) -> bool {
        self.relative_difference <= rel
    }

    /// Small-δ form disagrees with the exact count by more than 1 %.
    pub fn approximation_flagged(&self) -> bool {
        !self.approximation_within(0.01)
    }
}

/// Number of independent systems that bring the visibility down to `alpha`.
pub fn estimate_dof_bound(m: f64, alpha: f64) -> Result<DofBound> {
    if !(m < 1.0) {
        return Err(Error::NoDecoherence(m));
    }
    if !(m > 0.0) {
        return Err(Error::TotalDecoherence(m));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("target visibility must lie in (0, 1), got {alpha}")));
    }
    let log_alpha = alpha.ln();
    let n = log_alpha / (m - 1.0).ln_1p();
    let small_delta = -log_alpha / (1.0 - m);
    Ok(DofBound { n, small_delta, relative_difference: (small_delta - n).abs() / n })
}

/// Preparation time below which the background field cannot follow adiabatically: `hbar / (mu c^2)`.
pub fn adiabatic_timescale(mu_kg: f64) -> Result<f64> {
    if !(mu_kg > 0.0 && mu_kg.is_finite()) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {mu_kg}")));
    }
    Ok(HBAR / (mu_kg * SPEED_OF_LIGHT * SPEED_OF_LIGHT))
}

/// `|E_bare - E_mass|`.
pub fn energy_shift(bare: &GroundState, with_mass: &GroundState) -> f64 {
    (bare.energy - with_mass.energy).abs()
}
