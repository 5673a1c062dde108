//! Domain types shared by the simulator, the search stages and the I/O layer.

use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance (kW) for "not fully satisfied" and "available but not used".
pub const EPS_POWER: f64 = 1e-6;

/// Resolution used to quantize capacities into cache keys.
pub const KEY_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerKind {
    #[serde(alias = "diesel")]
    DieselGenerator,
    #[serde(alias = "pv", alias = "solar")]
    Photovoltaic,
    #[serde(alias = "wind")]
    WindTurbine,
    #[serde(alias = "bess", alias = "battery")]
    BatteryStorage,
}

impl DerKind {
    pub fn is_storage(self) -> bool {
        matches!(self, DerKind::BatteryStorage)
    }

    pub fn is_renewable(self) -> bool {
        matches!(self, DerKind::Photovoltaic | DerKind::WindTurbine)
    }

    /// Capacity unit: energy for storage, power otherwise.
    pub fn unit(self) -> &'static str {
        if self.is_storage() {
            "kwh"
        } else {
            "kw"
        }
    }

    /// Upper-bound multiplier applied to peak demand when none is configured.
    pub fn default_peak_multiplier(self) -> f64 {
        match self {
            DerKind::DieselGenerator | DerKind::WindTurbine => 1.0,
            DerKind::Photovoltaic => 3.0,
            DerKind::BatteryStorage => 5.0,
        }
    }
}

impl fmt::Display for DerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DerKind::DieselGenerator => "diesel_generator",
            DerKind::Photovoltaic => "photovoltaic",
            DerKind::WindTurbine => "wind_turbine",
            DerKind::BatteryStorage => "battery_storage",
        };
        f.write_str(s)
    }
}

/// One DER type of the design space with its capacity bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerSpec {
    pub name: String,
    pub kind: DerKind,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Hours: energy capacity divided by maximum charge power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_ratio: Option<f64>,
    /// Hours: energy capacity divided by maximum discharge power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discharge_ratio: Option<f64>,
}

impl DerSpec {
    pub fn generator(name: impl Into<String>, kind: DerKind, lower: f64, upper: f64) -> Result<Self> {
        let spec = DerSpec {
            name: name.into(),
            kind,
            lower_bound: lower,
            upper_bound: upper,
            charge_ratio: None,
            discharge_ratio: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn battery(
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        charge_ratio: f64,
        discharge_ratio: f64,
    ) -> Result<Self> {
        let spec = DerSpec {
            name: name.into(),
            kind: DerKind::BatteryStorage,
            lower_bound: lower,
            upper_bound: upper,
            charge_ratio: Some(charge_ratio),
            discharge_ratio: Some(discharge_ratio),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower_bound.is_finite() && self.upper_bound.is_finite()) {
            return Err(Error::invalid(format!("{}: bounds must be finite", self.name)));
        }
        if self.lower_bound < 0.0 {
            return Err(Error::invalid(format!("{}: lower bound must be >= 0", self.name)));
        }
        if self.lower_bound > self.upper_bound {
            return Err(Error::invalid(format!(
                "{}: lower bound {} exceeds upper bound {}",
                self.name, self.lower_bound, self.upper_bound
            )));
        }
        let ratios = [self.charge_ratio, self.discharge_ratio];
        if self.kind.is_storage() {
            for r in ratios {
                match r {
                    Some(h) if h > 0.0 && h.is_finite() => {}
                    _ => {
                        return Err(Error::invalid(format!(
                            "{}: battery storage needs positive charge and discharge ratios",
                            self.name
                        )))
                    }
                }
            }
        } else if ratios.iter().any(Option::is_some) {
            return Err(Error::invalid(format!(
                "{}: charge/discharge ratios only apply to battery storage",
                self.name
            )));
        }
        Ok(())
    }
}

/// Ordered set of DER types; index `i` of every design refers to `ders[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DerSpec>", into = "Vec<DerSpec>")]
pub struct DesignSpace {
    ders: Vec<DerSpec>,
}

impl DesignSpace {
    pub fn new(ders: Vec<DerSpec>) -> Result<Self> {
        if ders.is_empty() {
            return Err(Error::invalid("design space needs at least one DER"));
        }
        let mut seen = HashSet::new();
        for der in &ders {
            der.validate()?;
            if !seen.insert(der.name.as_str()) {
                return Err(Error::invalid(format!("duplicate DER name {:?}", der.name)));
            }
        }
        Ok(DesignSpace { ders })
    }

    pub fn ders(&self) -> &[DerSpec] {
        &self.ders
    }

    pub fn len(&self) -> usize {
        self.ders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ders.is_empty()
    }

    pub fn lower_bounds(&self) -> MicrogridDesign {
        MicrogridDesign::new(self.ders.iter().map(|d| d.lower_bound).collect())
    }

    pub fn upper_bounds(&self) -> MicrogridDesign {
        MicrogridDesign::new(self.ders.iter().map(|d| d.upper_bound).collect())
    }

    /// Checks the dimension and per-DER bounds of a design.
    pub fn check(&self, design: &MicrogridDesign) -> Result<()> {
        if design.len() != self.len() {
            return Err(Error::invalid(format!(
                "design has {} capacities, design space has {} DERs",
                design.len(),
                self.len()
            )));
        }
        for (der, &c) in self.ders.iter().zip(design.capacities()) {
            let tol = 1e-9 * der.upper_bound.abs().max(1.0);
            if !(c >= der.lower_bound - tol && c <= der.upper_bound + tol) {
                return Err(Error::invalid(format!(
                    "{}: capacity {} outside [{}, {}]",
                    der.name, c, der.lower_bound, der.upper_bound
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<DerSpec>> for DesignSpace {
    type Error = Error;

    fn try_from(ders: Vec<DerSpec>) -> Result<Self> {
        DesignSpace::new(ders)
    }
}

impl From<DesignSpace> for Vec<DerSpec> {
    fn from(space: DesignSpace) -> Self {
        space.ders
    }
}

/// A capacity per DER of the design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MicrogridDesign {
    capacities: Vec<f64>,
}

impl MicrogridDesign {
    pub fn new(capacities: Vec<f64>) -> Self {
        MicrogridDesign { capacities }
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    pub fn with_capacity(&self, der: usize, capacity: f64) -> Self {
        let mut capacities = self.capacities.clone();
        capacities[der] = capacity;
        MicrogridDesign { capacities }
    }

    pub fn key(&self) -> DesignKey {
        DesignKey(
            self.capacities
                .iter()
                .map(|c| (c / KEY_RESOLUTION).round() as i64)
                .collect(),
        )
    }
}

impl From<Vec<f64>> for MicrogridDesign {
    fn from(capacities: Vec<f64>) -> Self {
        MicrogridDesign::new(capacities)
    }
}

/// Quantized capacity vector; designs that differ by less than the key
/// resolution share a key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DesignKey(pub Vec<i64>);

/// Time-indexed power demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    times: Vec<NaiveDateTime>,
    durations: Vec<f64>,
    demand: Vec<f64>,
}

impl LoadProfile {
    /// `durations` in seconds, `demand` in kW.
    pub fn new(times: Vec<NaiveDateTime>, durations: Vec<f64>, demand: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("load profile needs at least one interval"));
        }
        if times.len() != durations.len() || times.len() != demand.len() {
            return Err(Error::invalid(format!(
                "load profile lengths differ: {} times, {} durations, {} demands",
                times.len(),
                durations.len(),
                demand.len()
            )));
        }
        if let Some(w) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "timestamps not strictly increasing at index {}",
                w + 1
            )));
        }
        if let Some(i) = durations.iter().position(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::invalid(format!("duration at index {i} must be positive")));
        }
        if let Some(i) = demand.iter().position(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid(format!("demand at index {i} must be >= 0")));
        }
        Ok(LoadProfile {
            times,
            durations,
            demand,
        })
    }

    pub fn times(&self) -> &[NaiveDateTime] {
        &self.times
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    pub fn peak(&self) -> f64 {
        self.demand.iter().copied().fold(0.0, f64::max)
    }

    /// Same timestamps and durations with every demand multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        LoadProfile::new(
            self.times.clone(),
            self.durations.clone(),
            self.demand.iter().map(|p| p * factor).collect(),
        )
    }
}

/// Per-step result of operating a design against a load profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub deficit_flags: Vec<bool>,
    /// `[der][step]` power the DER could have delivered (kW).
    pub per_der_available: Vec<Vec<f64>>,
    /// `[der][step]` power the DER actually delivered (kW), battery charging included.
    pub per_der_used: Vec<Vec<f64>>,
}

impl SimulationOutcome {
    pub fn steps(&self) -> usize {
        self.deficit_flags.len()
    }
}

/// A design together with its performance metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedDesign {
    pub design: MicrogridDesign,
    pub deficit_ratio: f64,
    /// −1 marks a DER with zero capacity (or no availability at all).
    pub unused_ratios: Vec<f64>,
}

impl EvaluatedDesign {
    pub fn capacities(&self) -> &[f64] {
        self.design.capacities()
    }

    pub fn has_deficit(&self) -> bool {
        self.deficit_ratio > 0.0
    }
}
