//! Physical scenario: the spin chain, the gravitating mass and where it sits.
//!
//! Sites are numbered `1..=L` and bonds `1..=L-1`, bond `i` joining sites
//! `i` and `i+1`. A mass at bond index `k` sits between sites `k` and `k+1`,
//! a perpendicular distance `d` away from the chain. Units are `G = c = 1`
//! with lengths in lattice units and energies in units of `Jx`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry and couplings of an open spin-1/2 chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    sites: usize,
    spacing: f64,
    jx: f64,
    jz: f64,
    fields: Vec<f64>,
}

impl ChainSpec {
    /// Chain with unit spacing and a uniform field `b`.
    pub fn uniform(sites: usize, jx: f64, jz: f64, b: f64) -> Result<Self> {
        Self::with_fields(sites, 1.0, jx, jz, vec![b; sites])
    }

    pub fn with_fields(
        sites: usize,
        spacing: f64,
        jx: f64,
        jz: f64,
        fields: Vec<f64>,
    ) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 sites, got {sites}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidChain(format!("lattice spacing must be positive, got {spacing}")));
        }
        if fields.len() != sites {
            return Err(Error::InvalidChain(format!(
                "field array has {} entries for {sites} sites",
                fields.len()
            )));
        }
        if !jx.is_finite() || !jz.is_finite() || fields.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidChain("couplings must be finite".into()));
        }
        Ok(Self { sites, spacing, jx, jz, fields })
    }

    /// XX chain: `Jx = 1`, `Jz = B = 0`.
    pub fn xx(sites: usize) -> Result<Self> {
        Self::uniform(sites, 1.0, 0.0, 0.0)
    }

    /// XXZ chain as used for the figures: `Jx = Jz = B = 1`.
    pub fn xxz(sites: usize) -> Result<Self> {
        Self::uniform(sites, 1.0, 1.0, 1.0)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn bonds(&self) -> usize {
        self.sites - 1
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn jx(&self) -> f64 {
        self.jx
    }

    pub fn jz(&self) -> f64 {
        self.jz
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn is_free_fermion(&self) -> bool {
        self.jz == 0.0
    }

    pub fn has_uniform_field(&self) -> bool {
        self.fields.windows(2).all(|w| w[0] == w[1])
    }

    /// Same chain with the sites listed in reverse order.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.fields.reverse();
        out
    }
}

/// Source of the gravitational redshift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MassModel {
    /// First-order post-Newtonian factor `1 - GM/r`.
    Newtonian { gm: f64 },
    /// Exact static factor `sqrt(1 - r_s/r)`, zero at and inside the horizon.
    Schwarzschild { rs: f64 },
}

impl MassModel {
    /// Newtonian source with `GM = 10^z`.
    pub fn from_z(z: f64) -> Self {
        MassModel::Newtonian { gm: 10f64.powf(z) }
    }

    /// Black hole with `r_s = x/2`, the embedded limiting case.
    pub fn half_spacing_black_hole(spacing: f64) -> Self {
        MassModel::Schwarzschild { rs: spacing / 2.0 }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MassModel::Newtonian { gm } if !(gm >= 0.0 && gm.is_finite()) => {
                Err(Error::InvalidMass(format!("GM must be finite and non-negative, got {gm}")))
            }
            MassModel::Schwarzschild { rs } if !(rs > 0.0 && rs.is_finite()) => {
                Err(Error::InvalidMass(format!("Schwarzschild radius must be positive, got {rs}")))
            }
            _ => Ok(()),
        }
    }

    /// Redshift factor at distance `r`; `None` when a Newtonian source sits on the term.
    fn factor_at(&self, r: f64) -> Option<f64> {
        match *self {
            MassModel::Newtonian { gm } => (r > 0.0).then(|| 1.0 - gm / r),
            MassModel::Schwarzschild { rs } => {
                if r <= rs {
                    Some(0.0)
                } else {
                    Some((1.0 - rs / r).max(0.0).sqrt())
                }
            }
        }
    }
}

/// Location of the mass: between sites `k` and `k+1`, at perpendicular distance `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub k: usize,
    pub d: f64,
}

impl Placement {
    pub fn new(k: usize, d: f64) -> Self {
        Self { k, d }
    }

    pub fn validate(&self, chain: &ChainSpec) -> Result<()> {
        if self.k < 1 || self.k >= chain.sites() {
            return Err(Error::InvalidPlacement(format!(
                "bond index k = {} must lie in 1..={}",
                self.k,
                chain.bonds()
            )));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidPlacement(format!("distance d = {} must be >= 0", self.d)));
        }
        Ok(())
    }

    /// Reflection `k -> L - k` of the placement.
    pub fn mirrored(&self, sites: usize) -> Self {
        Self { k: sites - self.k, d: self.d }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Edge,
    Middle,
    Custom,
}

impl Preset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Edge => "edge",
            Preset::Middle => "middle",
            Preset::Custom => "custom",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edge" => Ok(Preset::Edge),
            "middle" => Ok(Preset::Middle),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::InvalidArgument(format!("unknown configuration '{other}'"))),
        }
    }
}

/// The two branches of the mass superposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionConfig {
    pub left: Placement,
    pub right: Placement,
    pub preset: Preset,
}

impl SuperpositionConfig {
    pub fn custom(left: Placement, right: Placement) -> Result<Self> {
        if left == right {
            return Err(Error::InvalidPlacement(
                "both branches of the superposition are at the same placement".into(),
            ));
        }
        Ok(Self { left, right, preset: Preset::Custom })
    }

    /// `k1 = 3`, `k2 = L - 3`.
    pub fn edge(sites: usize, d: f64) -> Result<Self> {
        if sites < 7 {
            return Err(Error::InvalidPlacement(format!(
                "edge configuration needs L >= 7, got {sites}"
            )));
        }
        let mut cfg = Self::custom(Placement::new(3, d), Placement::new(sites - 3, d))?;
        cfg.preset = Preset::Edge;
        Ok(cfg)
    }

    /// `k1 = L/2 - 1`, `k2 = L/2 + 1`, even `L` only.
    pub fn middle(sites: usize, d: f64) -> Result<Self> {
        if sites % 2 != 0 || sites < 4 {
            return Err(Error::InvalidPlacement(format!(
                "middle configuration needs an even L >= 4, got {sites}"
            )));
        }
        let half = sites / 2;
        let mut cfg = Self::custom(Placement::new(half - 1, d), Placement::new(half + 1, d))?;
        cfg.preset = Preset::Middle;
        Ok(cfg)
    }

    pub fn from_preset(preset: Preset, sites: usize, d: f64) -> Result<Self> {
        match preset {
            Preset::Edge => Self::edge(sites, d),
            Preset::Middle => Self::middle(sites, d),
            Preset::Custom => Err(Error::InvalidArgument(
                "custom configurations need explicit placements".into(),
            )),
        }
    }
}

/// Distance from a mass at bond `k` to the single-site term of site `i`.
pub fn site_distance(k: usize, i: usize, spacing: f64, d: f64) -> f64 {
    let offset = (k as f64 - i as f64 + 0.5) * spacing;
    offset.hypot(d)
}

/// Distance from a mass at bond `k` to the midpoint of bond `i`.
pub fn bond_distance(k: usize, i: usize, spacing: f64, d: f64) -> f64 {
    let offset = (k as f64 - i as f64) * spacing;
    offset.hypot(d)
}

/// Multiplicative redshift factors for every term of the chain Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RedshiftProfile {
    site: Vec<f64>,
    bond: Vec<f64>,
}

impl RedshiftProfile {
    /// No gravity: every factor is exactly one.
    pub fn identity(sites: usize) -> Self {
        Self { site: vec![1.0; sites], bond: vec![1.0; sites.saturating_sub(1)] }
    }

    /// Arbitrary factors, each in `[0, 1]`.
    pub fn from_factors(site: Vec<f64>, bond: Vec<f64>) -> Result<Self> {
        if site.len() < 2 || bond.len() + 1 != site.len() {
            return Err(Error::DimensionMismatch { expected: site.len().saturating_sub(1), found: bond.len() });
        }
        for (term, factors) in [("site", &site), ("bond", &bond)] {
            if let Some((i, &f)) = factors.iter().enumerate().find(|(_, f)| !(0.0..=1.0).contains(*f)) {
                return Err(Error::FactorOutOfRange { term, index: i + 1, factor: f });
            }
        }
        Ok(Self { site, bond })
    }

    pub fn site_factors(&self) -> &[f64] {
        &self.site
    }

    pub fn bond_factors(&self) -> &[f64] {
        &self.bond
    }

    pub fn sites(&self) -> usize {
        self.site.len()
    }

    pub fn is_identity(&self) -> bool {
        self.site.iter().chain(&self.bond).all(|&f| f == 1.0)
    }

    /// Profile seen by the reflected chain `i -> L + 1 - i`.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.site.reverse();
        out.bond.reverse();
        out
    }

    /// Every factor multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            site: self.site.iter().map(|x| x * f).collect(),
            bond: self.bond.iter().map(|x| x * f).collect(),
        }
    }
}

/// Redshift factors on every site and bond for a mass at `placement`.
pub fn build_redshift_profile(
    chain: &ChainSpec,
    mass: &MassModel,
    placement: &Placement,
) -> Result<RedshiftProfile> {
    mass.validate()?;
    placement.validate(chain)?;
    let (k, d, x) = (placement.k, placement.d, chain.spacing());

    let factor = |term: &'static str, index: usize, r: f64| -> Result<f64> {
        let f = mass
            .factor_at(r)
            .ok_or(Error::NonPositiveDistance { term, index })?;
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::FactorOutOfRange { term, index, factor: f });
        }
        Ok(f)
    };

    let site = (1..=chain.sites())
        .map(|i| factor("site", i, site_distance(k, i, x, d)))
        .collect::<Result<Vec<_>>>()?;
    let bond = (1..=chain.bonds())
        .map(|i| factor("bond", i, bond_distance(k, i, x, d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RedshiftProfile { site, bond })
}
