//! Deterministic synthetic load profiles with day/night structure.

use chrono::{Datelike, Duration, NaiveDateTime, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::LoadProfile;

/// Shape of a synthetic profile. Demand is rescaled so its maximum equals
/// `peak_kw`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLoad {
    pub start: NaiveDateTime,
    pub steps: usize,
    pub step_seconds: i64,
    pub peak_kw: f64,
    /// Relative amplitude of the seeded noise.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticLoad {
    /// Two weeks at four-minute resolution.
    pub fn two_weeks(peak_kw: f64, seed: u64) -> Self {
        SyntheticLoad {
            start: default_start(),
            steps: 5040,
            step_seconds: 240,
            peak_kw,
            noise: 0.04,
            seed,
        }
    }

    /// One day at half-hour resolution.
    pub fn one_day(peak_kw: f64, seed: u64) -> Self {
        SyntheticLoad {
            start: default_start(),
            steps: 48,
            step_seconds: 1800,
            peak_kw,
            noise: 0.04,
            seed,
        }
    }

    pub fn generate(&self) -> Result<LoadProfile> {
        if self.steps < 1 || self.step_seconds < 1 || !(self.peak_kw > 0.0) {
            return Err(Error::invalid("synthetic load needs steps, a positive step and a positive peak"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let times: Vec<NaiveDateTime> = (0..self.steps as i64)
            .map(|k| self.start + Duration::seconds(k * self.step_seconds))
            .collect();
        let raw: Vec<f64> = times
            .iter()
            .map(|t| {
                let jitter = 1.0 + self.noise * (rng.random::<f64>() * 2.0 - 1.0);
                shape(t) * jitter
            })
            .collect();
        let max = raw.iter().copied().fold(0.0, f64::max);
        let demand = raw
            .iter()
            .map(|v| ((v / max * self.peak_kw) * 100.0).round() / 100.0)
            .collect();
        LoadProfile::new(times, vec![self.step_seconds as f64; self.steps], demand)
    }
}

fn default_start() -> NaiveDateTime {
    chrono::NaiveDate::from_ymd_opt(2024, 6, 3)
        .expect("valid date")
        .and_hms_opt(0, 0, 0)
        .expect("valid time")
}

/// Base load with a morning shoulder and an evening peak; weekends run lighter.
fn shape(t: &NaiveDateTime) -> f64 {
    let h = t.hour() as f64 + t.minute() as f64 / 60.0;
    let bump = |center: f64, width: f64| (-((h - center) / width).powi(2)).exp();
    let weekday = if t.weekday().number_from_monday() >= 6 { 0.9 } else { 1.0 };
    weekday * (0.55 + 0.2 * bump(8.0, 2.0) + 0.15 * bump(13.0, 3.0) + 0.35 * bump(19.5, 2.5))
}
