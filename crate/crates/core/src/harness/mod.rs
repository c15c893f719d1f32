//! Parameter sweeps, their CSV output, and the command line front end.

pub mod cli;
pub mod config;
pub mod oracle;
pub mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ChainSpec;

pub use config::SweepFile;
pub use sweep::{run_sweep, RunRecord, Status, SweepOutput, SweepSpec};

/// Named coupling sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// `Jx = 1, Jz = B = 0`.
    XX,
    /// `Jx = Jz = B = 1`.
    XXZ,
    /// Same couplings as [`ModelKind::XXZ`], under the name used for the black-hole sweep.
    Heisenberg,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::XX => "XX",
            ModelKind::XXZ => "XXZ",
            ModelKind::Heisenberg => "Heisenberg",
        }
    }

    pub fn jz(&self) -> f64 {
        match self {
            ModelKind::XX => 0.0,
            ModelKind::XXZ | ModelKind::Heisenberg => 1.0,
        }
    }

    pub fn field(&self) -> f64 {
        self.jz()
    }

    /// Chain with this model's couplings; `field` replaces the default uniform field.
    pub fn chain(&self, sites: usize, field: Option<f64>) -> Result<ChainSpec> {
        ChainSpec::uniform(sites, 1.0, self.jz(), field.unwrap_or(self.field()))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xx" => Ok(ModelKind::XX),
            "xxz" => Ok(ModelKind::XXZ),
            "heisenberg" => Ok(ModelKind::Heisenberg),
            _ => Err(Error::InvalidArgument(format!("unknown model `{s}` (expected XX, XXZ or Heisenberg)"))),
        }
    }
}

/// Which dataset a sweep produces; fixes the grid layout and CSV schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Custom,
}

impl Figure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Custom => "custom",
        }
    }

    /// CSV header, in column order.
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Figure::Fig3 => &["model", "config", "L", "k1", "k2", "d", "GM", "E0", "E1", "E2", "abs_E0_E1", "status"],
            Figure::Fig4 => &["panel", "model", "config", "z", "d", "M", "one_minus_M", "status"],
            Figure::Fig5 => &["model", "k1", "k2", "GM", "d", "M", "one_minus_M", "status"],
            Figure::Fig6 => &["model", "Jz", "k1", "k2", "M", "status"],
            Figure::Custom => &["model", "L", "k1", "k2", "GM", "d", "E1", "E2", "M", "one_minus_M", "status"],
        }
    }

    /// Leading columns that identify a grid point.
    pub fn key_columns(&self) -> usize {
        match self {
            Figure::Fig3 => 7,
            Figure::Fig4 => 5,
            Figure::Fig5 => 5,
            Figure::Fig6 => 4,
            Figure::Custom => 6,
        }
    }

    /// Tag stored with every record; bumped whenever a schema changes.
    pub fn schema_version(&self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3/1",
            Figure::Fig4 => "fig4/1",
            Figure::Fig5 => "fig5/1",
            Figure::Fig6 => "fig6/1",
            Figure::Custom => "custom/1",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().trim_start_matches("fig") {
            "3" => Ok(Figure::Fig3),
            "4" => Ok(Figure::Fig4),
            "5" => Ok(Figure::Fig5),
            "6" => Ok(Figure::Fig6),
            "custom" => Ok(Figure::Custom),
            _ => Err(Error::InvalidArgument(format!("unknown figure `{s}` (expected 3, 4, 5, 6 or custom)"))),
        }
    }
}
