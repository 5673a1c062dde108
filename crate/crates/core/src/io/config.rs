//! JSON configuration document for a sizing run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerKind, DerSpec, DesignSpace, LoadProfile};
use crate::search::SearchConfig;
use crate::simulator::DispatchConfig;

pub const DEFAULT_CAPACITY_PRECISION: f64 = 5.0;
pub const DEFAULT_STORAGE_RATIO_HOURS: f64 = 2.0;

fn default_precision() -> f64 {
    DEFAULT_CAPACITY_PRECISION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerEntry {
    pub name: String,
    pub kind: DerKind,
    #[serde(default)]
    pub lower_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    /// Upper bound as a multiple of peak demand. When neither this nor
    /// `upper_bound` is given, the kind's default multiplier applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discharge_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfigFile {
    pub ders: Vec<DerEntry>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub dispatch: DispatchConfig,
    pub load_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind_series_path: Option<PathBuf>,
    /// Multiplier-derived upper bounds are rounded up to this step.
    #[serde(default = "default_precision")]
    pub capacity_precision: f64,
}

impl PipelineConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: PipelineConfigFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        let resolve = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };
        config.load_path = resolve(&config.load_path);
        config.output_path = config.output_path.as_ref().map(resolve);
        config.wind_series_path = config.wind_series_path.as_ref().map(resolve);
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ders.is_empty() {
            return Err(Error::Config("at least one DER is required".into()));
        }
        for der in &self.ders {
            if der.upper_bound.is_some() && der.peak_multiplier.is_some() {
                return Err(Error::Config(format!(
                    "{}: give either upper_bound or peak_multiplier, not both",
                    der.name
                )));
            }
            if let Some(m) = der.peak_multiplier {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(Error::Config(format!("{}: peak_multiplier must be positive", der.name)));
                }
            }
        }
        if !(self.capacity_precision > 0.0 && self.capacity_precision.is_finite()) {
            return Err(Error::Config("capacity_precision must be positive".into()));
        }
        self.search.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.dispatch.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Rounds `value` up to a multiple of `precision`, ignoring float noise.
pub fn round_up(value: f64, precision: f64) -> f64 {
    let steps = value / precision;
    let nearest = steps.round();
    if (steps - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest * precision
    } else {
        steps.ceil() * precision
    }
}

/// Builds the design space, turning peak multipliers into upper bounds.
pub fn resolve_bounds(config: &PipelineConfigFile, load: &LoadProfile) -> Result<DesignSpace> {
    let peak = load.peak();
    let ders = config
        .ders
        .iter()
        .map(|entry| {
            let upper = match entry.upper_bound {
                Some(u) => u,
                None => {
                    let multiplier = entry
                        .peak_multiplier
                        .unwrap_or_else(|| entry.kind.default_peak_multiplier());
                    round_up(multiplier * peak, config.capacity_precision)
                }
            };
            let storage = entry.kind.is_storage();
            let ratio = |r: Option<f64>| {
                if storage {
                    Some(r.unwrap_or(DEFAULT_STORAGE_RATIO_HOURS))
                } else {
                    r
                }
            };
            let spec = DerSpec {
                name: entry.name.clone(),
                kind: entry.kind,
                lower_bound: entry.lower_bound,
                upper_bound: upper,
                charge_ratio: ratio(entry.charge_ratio),
                discharge_ratio: ratio(entry.discharge_ratio),
            };
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    DesignSpace::new(ders).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::load::parse_load_profile;

    fn load(peak: f64) -> LoadProfile {
        parse_load_profile(&format!(
            "datetime,load_kw\n2024-01-01T00:00:00,{}\n2024-01-01T01:00:00,{peak}\n",
            peak / 2.0
        ))
        .unwrap()
    }

    const DOC: &str = r#"{
        "ders": [
            {"name": "diesel", "kind": "diesel_generator"},
            {"name": "pv", "kind": "photovoltaic", "peak_multiplier": 3},
            {"name": "bess", "kind": "battery_storage", "charge_ratio": 1.5},
            {"name": "wind", "kind": "wind", "upper_bound": 250}
        ],
        "search": {"fine_level_points": 21, "rng_seed": 7},
        "load_path": "load.csv"
    }"#;

    #[test]
    fn multipliers_scale_peak() {
        let config = PipelineConfigFile::from_json(DOC).unwrap();
        let space = resolve_bounds(&config, &load(120.0)).unwrap();
        let uppers: Vec<f64> = space.ders().iter().map(|d| d.upper_bound).collect();
        assert_eq!(uppers, vec![120.0, 360.0, 600.0, 250.0]);
        let bess = &space.ders()[2];
        assert_eq!((bess.charge_ratio, bess.discharge_ratio), (Some(1.5), Some(2.0)));
        assert_eq!(config.search.fine_level_points, 21);
        assert_eq!(config.search.coarse_level_points, 6);
        assert_eq!(config.capacity_precision, 5.0);
    }

    #[test]
    fn multiplied_bounds_round_up() {
        let config = PipelineConfigFile::from_json(DOC).unwrap();
        let space = resolve_bounds(&config, &load(101.2)).unwrap();
        assert_eq!(space.ders()[0].upper_bound, 105.0);
        assert_eq!(space.ders()[1].upper_bound, 305.0);
        assert_eq!(space.ders()[3].upper_bound, 250.0);
    }

    #[test]
    fn both_bounds_is_an_error() {
        let doc = r#"{"ders": [{"name": "d", "kind": "diesel", "upper_bound": 5, "peak_multiplier": 1}], "load_path": "x"}"#;
        assert!(matches!(PipelineConfigFile::from_json(doc), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = r#"{"ders": [{"name": "d", "kind": "diesel"}], "load_path": "x", "colour": 1}"#;
        assert!(PipelineConfigFile::from_json(doc).is_err());
    }

    #[test]
    fn round_up_ignores_noise() {
        assert_eq!(round_up(360.00000000001, 5.0), 360.0);
        assert_eq!(round_up(3.0 * 120.1, 5.0), 365.0);
        assert_eq!(round_up(0.0, 5.0), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bounds_grow_with_peak(peak in 1.0f64..5000.0, k in 1.0f64..10.0) {
                let config = PipelineConfigFile::from_json(DOC).unwrap();
                let base = load(peak);
                let a = resolve_bounds(&config, &base).unwrap();
                let b = resolve_bounds(&config, &base.scaled(k).unwrap()).unwrap();
                for (x, y) in a.ders().iter().zip(b.ders()) {
                    prop_assert!(y.upper_bound >= x.upper_bound);
                }
            }
        }
    }
}
