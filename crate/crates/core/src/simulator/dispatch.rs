//! Single-step energy management logic of the reference simulator.
//!
//! Merit order within a step:
//!
//! 1. photovoltaic, then wind, serve demand up to their availability;
//! 2. renewable surplus charges the batteries;
//! 3. diesel generators cover what renewables could not;
//! 4. batteries discharge to cover the rest;
//! 5. anything still unserved beyond [`EPS_POWER`] is a deficit.
//!
//! Batteries only ever cover the residual the dispatchable generation left
//! behind, so a larger capacity of any DER can never turn a design that meets
//! demand at every step into one that does not.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerKind, EPS_POWER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispatchConfig {
    /// Hour of day at which photovoltaic output starts.
    pub pv_daylight_start: f64,
    pub pv_daylight_end: f64,
    pub pv_peak_factor: f64,
    /// Constant wind capacity factor, used unless a wind series is supplied.
    pub wind_capacity_factor: f64,
    pub bess_charge_efficiency: f64,
    pub bess_discharge_efficiency: f64,
    pub bess_min_soc: f64,
    pub bess_initial_soc: f64,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            pv_daylight_start: 6.0,
            pv_daylight_end: 18.0,
            pv_peak_factor: 1.0,
            wind_capacity_factor: 0.35,
            bess_charge_efficiency: 0.95,
            bess_discharge_efficiency: 0.95,
            bess_min_soc: 0.10,
            bess_initial_soc: 1.0,
        }
    }
}

impl DispatchConfig {
    pub fn validate(&self) -> Result<()> {
        let fractions = [
            ("pv_peak_factor", self.pv_peak_factor),
            ("wind_capacity_factor", self.wind_capacity_factor),
            ("bess_charge_efficiency", self.bess_charge_efficiency),
            ("bess_discharge_efficiency", self.bess_discharge_efficiency),
            ("bess_min_soc", self.bess_min_soc),
            ("bess_initial_soc", self.bess_initial_soc),
        ];
        for (name, value) in fractions {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::invalid(format!("{name} must be in (0, 1], got {value}")));
            }
        }
        if self.bess_min_soc >= self.bess_initial_soc {
            return Err(Error::invalid("bess_min_soc must be below bess_initial_soc"));
        }
        let hours = 0.0..=24.0;
        if !hours.contains(&self.pv_daylight_start) || !hours.contains(&self.pv_daylight_end) {
            return Err(Error::invalid("daylight window must lie within 0..24 h"));
        }
        if self.pv_daylight_end <= self.pv_daylight_start {
            return Err(Error::invalid("daylight window end must be after its start"));
        }
        Ok(())
    }
}

/// Battery energy and power limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BessState {
    /// kWh
    pub energy_stored: f64,
    /// kWh
    pub energy_capacity: f64,
    /// kW
    pub max_charge_power: f64,
    /// kW
    pub max_discharge_power: f64,
}

impl BessState {
    pub fn new(capacity_kwh: f64, charge_ratio: f64, discharge_ratio: f64, soc: f64) -> Self {
        BessState {
            energy_stored: capacity_kwh * soc,
            energy_capacity: capacity_kwh,
            max_charge_power: capacity_kwh / charge_ratio,
            max_discharge_power: capacity_kwh / discharge_ratio,
        }
    }

    pub fn soc(&self) -> f64 {
        if self.energy_capacity > 0.0 {
            self.energy_stored / self.energy_capacity
        } else {
            0.0
        }
    }

    /// Power the battery could deliver over `hours` without dropping below `min_soc`.
    pub fn discharge_limit(&self, min_soc: f64, efficiency: f64, hours: f64) -> f64 {
        let usable = (self.energy_stored - min_soc * self.energy_capacity).max(0.0);
        self.max_discharge_power.min(usable * efficiency / hours)
    }

    /// Power the battery could absorb over `hours` before it is full.
    pub fn charge_limit(&self, efficiency: f64, hours: f64) -> f64 {
        let headroom = (self.energy_capacity - self.energy_stored).max(0.0);
        self.max_charge_power.min(headroom / (efficiency * hours))
    }
}

/// Result of dispatching one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// Per-DER delivered power (kW); renewable power sent to a battery counts.
    pub used: Vec<f64>,
    /// Per-DER available power (kW); for batteries, the discharge limit.
    pub available: Vec<f64>,
    pub deficit: bool,
}

/// Dispatches one step.
///
/// `available` holds, per DER, the power a generator could deliver; entries
/// for batteries are ignored. `batteries[i]` must be `Some` exactly for
/// battery DERs and is updated in place.
pub fn dispatch_step(
    kinds: &[DerKind],
    demand_kw: f64,
    available: &[f64],
    batteries: &mut [Option<BessState>],
    config: &DispatchConfig,
    duration_s: f64,
) -> StepResult {
    let mut result = StepResult {
        used: vec![0.0; kinds.len()],
        available: available.to_vec(),
        deficit: false,
    };
    result.deficit = dispatch_into(
        kinds,
        demand_kw,
        batteries,
        config,
        duration_s / 3600.0,
        &mut result.available,
        &mut result.used,
    );
    result
}

const RENEWABLE_ORDER: [DerKind; 2] = [DerKind::Photovoltaic, DerKind::WindTurbine];

/// Allocation-free core of [`dispatch_step`]. On entry `available` holds the
/// generator availabilities; on return it also carries battery discharge
/// limits. Returns the deficit flag.
pub(crate) fn dispatch_into(
    kinds: &[DerKind],
    demand_kw: f64,
    batteries: &mut [Option<BessState>],
    config: &DispatchConfig,
    hours: f64,
    available: &mut [f64],
    used: &mut [f64],
) -> bool {
    used.iter_mut().for_each(|u| *u = 0.0);
    let mut residual = demand_kw;

    for kind in RENEWABLE_ORDER {
        for i in (0..kinds.len()).filter(|&i| kinds[i] == kind) {
            let take = available[i].min(residual);
            used[i] = take;
            residual -= take;
        }
    }

    let mut surplus: f64 = RENEWABLE_ORDER
        .iter()
        .flat_map(|&kind| (0..kinds.len()).filter(move |&i| kinds[i] == kind))
        .map(|i| available[i] - used[i])
        .sum();
    let mut charged = 0.0;
    for bess in batteries.iter_mut().flatten() {
        if surplus <= 0.0 {
            break;
        }
        let power = surplus.min(bess.charge_limit(config.bess_charge_efficiency, hours));
        bess.energy_stored =
            (bess.energy_stored + power * config.bess_charge_efficiency * hours).min(bess.energy_capacity);
        surplus -= power;
        charged += power;
    }
    // Credit charging power back to the renewables that produced it.
    for kind in RENEWABLE_ORDER {
        for i in (0..kinds.len()).filter(|&i| kinds[i] == kind) {
            if charged <= 0.0 {
                break;
            }
            let extra = (available[i] - used[i]).min(charged);
            used[i] += extra;
            charged -= extra;
        }
    }

    for i in (0..kinds.len()).filter(|&i| kinds[i] == DerKind::DieselGenerator) {
        let take = available[i].min(residual);
        used[i] = take;
        residual -= take;
    }

    for (i, slot) in batteries.iter_mut().enumerate() {
        let Some(bess) = slot else { continue };
        let limit = bess.discharge_limit(config.bess_min_soc, config.bess_discharge_efficiency, hours);
        available[i] = limit;
        let take = limit.min(residual.max(0.0));
        used[i] = take;
        residual -= take;
        bess.energy_stored -= take * hours / config.bess_discharge_efficiency;
        bess.energy_stored = bess
            .energy_stored
            .max(config.bess_min_soc * bess.energy_capacity)
            .min(bess.energy_capacity);
    }

    residual > EPS_POWER
}
