//! Per-step availability factors for weather-dependent DERs.

use chrono::{NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::DispatchConfig;

fn fractional_hour(t: &NaiveDateTime) -> f64 {
    t.hour() as f64 + t.minute() as f64 / 60.0 + (t.second() as f64 + t.nanosecond() as f64 * 1e-9) / 3600.0
}

/// Clamped-sine photovoltaic availability inside the daylight window.
pub fn pv_availability(times: &[NaiveDateTime], config: &DispatchConfig) -> Result<Vec<f64>> {
    let (start, end) = (config.pv_daylight_start, config.pv_daylight_end);
    if !(end > start) {
        return Err(Error::invalid(format!(
            "daylight window end {end} must be after start {start}"
        )));
    }
    let width = end - start;
    Ok(times
        .iter()
        .map(|t| {
            let h = fractional_hour(t);
            if h <= start || h >= end {
                0.0
            } else {
                config.pv_peak_factor * (std::f64::consts::PI * (h - start) / width).sin().max(0.0)
            }
        })
        .collect())
}

/// Capacity factor time series for wind turbines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindSeries {
    times: Vec<NaiveDateTime>,
    factors: Vec<f64>,
}

impl WindSeries {
    pub fn new(times: Vec<NaiveDateTime>, factors: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != factors.len() {
            return Err(Error::invalid("wind series needs matching, non-empty columns"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("wind series timestamps must be strictly increasing"));
        }
        if let Some(f) = factors.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::invalid(format!("wind capacity factor {f} outside [0, 1]")));
        }
        Ok(WindSeries { times, factors })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Factor in force at each requested time (last sample at or before it).
    /// Fails unless the series spans every requested time.
    pub fn factors_at(&self, times: &[NaiveDateTime]) -> Result<Vec<f64>> {
        let (Some(first), Some(last)) = (times.first(), times.last()) else {
            return Ok(Vec::new());
        };
        let (series_first, series_last) = (self.times[0], self.times[self.times.len() - 1]);
        if *first < series_first || *last > series_last {
            return Err(Error::invalid(format!(
                "wind series covers {series_first} to {series_last} but the load runs from {first} to {last}"
            )));
        }
        Ok(times
            .iter()
            .map(|t| {
                let idx = self.times.partition_point(|s| s <= t) - 1;
                self.factors[idx]
            })
            .collect())
    }
}

/// Source of wind capacity factors.
#[derive(Debug, Clone, PartialEq)]
pub enum WindModel {
    Constant(f64),
    Series(WindSeries),
}

impl WindModel {
    pub fn availability(&self, times: &[NaiveDateTime]) -> Result<Vec<f64>> {
        match self {
            WindModel::Constant(f) => Ok(vec![*f; times.len()]),
            WindModel::Series(series) => series.factors_at(times),
        }
    }
}
