//! TOML run configuration.
//!
//! Every key is optional; anything left out falls back to the figure preset.
//!
//! ```toml
//! figure = "fig4"
//! full_scale = false
//! models = ["XX", "XXZ"]
//! lengths = [12]
//! z = [-3.0, -2.0, -1.0, 0.0]
//! distances = [5.0, 10.0, 20.0]
//! configs = ["middle", "edge"]
//! output = "fig4.csv"
//! threads = 4
//!
//! [solver]
//! tolerance = 1e-10
//! seed = 0
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{Figure, ModelKind, SweepSpec};
use crate::eigensolve::SolverOptions;
use crate::error::{Error, Result};
use crate::model::Preset;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub figure: Option<String>,
    pub full_scale: Option<bool>,
    pub models: Option<Vec<String>>,
    pub lengths: Option<Vec<usize>>,
    pub z: Option<Vec<f64>>,
    pub gm_values: Option<Vec<f64>>,
    pub distances: Option<Vec<f64>>,
    pub gm: Option<f64>,
    pub d: Option<f64>,
    pub configs: Option<Vec<String>>,
    pub k1: Option<Vec<usize>>,
    pub k2: Option<Vec<usize>>,
    pub schwarzschild_radius: Option<f64>,
    pub field: Option<f64>,
    pub cache: Option<bool>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub solver: Option<SolverOptions>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn figure(&self) -> Result<Option<Figure>> {
        self.figure.as_deref().map(str::parse).transpose()
    }

    /// Preset for the configured figure (or `fallback`), overridden by every key present.
    pub fn to_spec(&self, fallback: Figure, full_scale: bool) -> Result<SweepSpec> {
        let figure = self.figure()?.unwrap_or(fallback);
        let mut spec = SweepSpec::preset(figure, self.full_scale.unwrap_or(full_scale));
        self.apply(&mut spec)?;
        Ok(spec)
    }

    pub fn apply(&self, spec: &mut SweepSpec) -> Result<()> {
        if let Some(m) = &self.models {
            spec.models = m.iter().map(|s| s.parse()).collect::<Result<Vec<ModelKind>>>()?;
        }
        if let Some(c) = &self.configs {
            spec.configs = c.iter().map(|s| s.parse()).collect::<Result<Vec<Preset>>>()?;
        }
        macro_rules! copy {
            ($($src:ident => $dst:ident),* $(,)?) => {
                $(if let Some(v) = &self.$src { spec.$dst = v.clone(); })*
            };
        }
        copy!(
            lengths => lengths,
            z => z_values,
            gm_values => gm_values,
            distances => distances,
            gm => gm,
            d => d,
            k1 => k1_values,
            k2 => k2_values,
            schwarzschild_radius => schwarzschild_radius,
            cache => use_cache,
            solver => solver,
        );
        if self.field.is_some() {
            spec.field = self.field;
        }
        if self.output.is_some() {
            spec.output = self.output.clone();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_example_parses() {
        let text = r#"
            figure = "fig4"
            full_scale = false
            models = ["XX", "XXZ"]
            lengths = [12]
            z = [-3.0, -2.0, -1.0, 0.0]
            distances = [5.0, 10.0, 20.0]
            configs = ["middle", "edge"]
            output = "fig4.csv"
            threads = 4

            [solver]
            tolerance = 1e-10
            seed = 0
        "#;
        let file = SweepFile::parse(text).unwrap();
        let spec = file.to_spec(Figure::Fig3, false).unwrap();
        assert_eq!(spec.figure, Figure::Fig4);
        assert_eq!(spec.distances, vec![5.0, 10.0, 20.0]);
        assert_eq!(spec.output.as_deref(), Some(Path::new("fig4.csv")));
        assert_eq!(spec.solver, SolverOptions::default());
        assert_eq!(file.threads, Some(4));
    }

    #[test]
    fn missing_keys_keep_the_preset() {
        let spec = SweepFile::parse("").unwrap().to_spec(Figure::Fig6, false).unwrap();
        assert_eq!(spec, SweepSpec::preset(Figure::Fig6, false));
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert!(matches!(SweepFile::parse("colour = 3"), Err(Error::Config(_))));
        assert!(matches!(SweepFile::parse("[solver]\nspeed = 1"), Err(Error::Config(_))));
        let f = SweepFile::parse("models = [\"XY\"]").unwrap();
        assert!(f.to_spec(Figure::Fig3, false).is_err());
    }
}
