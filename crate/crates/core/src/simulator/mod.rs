//! Microgrid operation: the design/load to outcome function searched over.

mod availability;
mod cache;
mod dispatch;

pub use availability::{pv_availability, WindModel, WindSeries};
pub use cache::{Evaluator, SimulationCache};
pub use dispatch::{dispatch_step, BessState, DispatchConfig, StepResult};

use crate::error::{Error, Result};
use crate::model::{DerKind, DesignSpace, LoadProfile, MicrogridDesign, SimulationOutcome};

/// Operates a microgrid design against a load profile. Implementations must
/// be deterministic.
pub trait Simulator: Send + Sync {
    fn operate(&self, design: &MicrogridDesign, load: &LoadProfile) -> Result<SimulationOutcome>;
}

/// Deterministic dispatch simulator with clamped-sine photovoltaic output,
/// wind capacity factors and battery state-of-charge tracking.
#[derive(Debug, Clone)]
pub struct ReferenceSimulator {
    space: DesignSpace,
    config: DispatchConfig,
    wind: WindModel,
}

impl ReferenceSimulator {
    pub fn new(space: DesignSpace, config: DispatchConfig) -> Result<Self> {
        config.validate()?;
        let wind = WindModel::Constant(config.wind_capacity_factor);
        Ok(ReferenceSimulator { space, config, wind })
    }

    pub fn with_wind_series(mut self, series: WindSeries) -> Self {
        self.wind = WindModel::Series(series);
        self
    }

    pub fn space(&self) -> &DesignSpace {
        &self.space
    }

    pub fn config(&self) -> &DispatchConfig {
        &self.config
    }
}

impl Simulator for ReferenceSimulator {
    fn operate(&self, design: &MicrogridDesign, load: &LoadProfile) -> Result<SimulationOutcome> {
        operate(&self.space, design, load, &self.config, &self.wind)
    }
}

/// Runs the dispatch over every step of `load`, starting each battery at the
/// configured initial state of charge.
pub fn operate(
    space: &DesignSpace,
    design: &MicrogridDesign,
    load: &LoadProfile,
    config: &DispatchConfig,
    wind: &WindModel,
) -> Result<SimulationOutcome> {
    space.check(design)?;
    let steps = load.len();
    let ders = space.ders();
    let kinds: Vec<DerKind> = ders.iter().map(|d| d.kind).collect();
    let capacities = design.capacities();

    let pv = if kinds.contains(&DerKind::Photovoltaic) {
        pv_availability(load.times(), config)?
    } else {
        Vec::new()
    };
    let wind = if kinds.contains(&DerKind::WindTurbine) {
        wind.availability(load.times())?
    } else {
        Vec::new()
    };
    if wind.len() != pv.len() && !pv.is_empty() && !wind.is_empty() {
        return Err(Error::invalid("availability series length mismatch"));
    }

    let mut batteries: Vec<Option<BessState>> = ders
        .iter()
        .zip(capacities)
        .map(|(der, &cap)| {
            der.kind.is_storage().then(|| {
                BessState::new(
                    cap,
                    der.charge_ratio.unwrap_or(2.0),
                    der.discharge_ratio.unwrap_or(2.0),
                    config.bess_initial_soc,
                )
            })
        })
        .collect();

    let mut outcome = SimulationOutcome {
        deficit_flags: vec![false; steps],
        per_der_available: vec![vec![0.0; steps]; ders.len()],
        per_der_used: vec![vec![0.0; steps]; ders.len()],
    };
    let mut available = vec![0.0; ders.len()];
    let mut used = vec![0.0; ders.len()];
    for t in 0..steps {
        for (i, kind) in kinds.iter().enumerate() {
            available[i] = match kind {
                DerKind::DieselGenerator => capacities[i],
                DerKind::Photovoltaic => capacities[i] * pv[t],
                DerKind::WindTurbine => capacities[i] * wind[t],
                DerKind::BatteryStorage => 0.0,
            };
        }
        let hours = load.durations()[t] / 3600.0;
        outcome.deficit_flags[t] = dispatch::dispatch_into(
            &kinds,
            load.demand()[t],
            &mut batteries,
            config,
            hours,
            &mut available,
            &mut used,
        );
        for i in 0..ders.len() {
            outcome.per_der_available[i][t] = available[i];
            outcome.per_der_used[i][t] = used[i];
        }
    }
    Ok(outcome)
}
