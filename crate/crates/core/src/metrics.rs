//! Deficit and unused-capacity metrics derived from a simulation outcome.

use crate::error::{Error, Result};
use crate::model::{EvaluatedDesign, LoadProfile, MicrogridDesign, SimulationOutcome, EPS_POWER};

/// Duration-weighted fraction of the horizon with unmet demand.
pub fn deficit_ratio(outcome: &SimulationOutcome, load: &LoadProfile) -> Result<f64> {
    if outcome.steps() != load.len() {
        return Err(Error::invalid(format!(
            "outcome has {} steps, load has {}",
            outcome.steps(),
            load.len()
        )));
    }
    let total = load.total_duration();
    let short: f64 = outcome
        .deficit_flags
        .iter()
        .zip(load.durations())
        .filter(|(&flag, _)| flag)
        .fold(0.0, |acc, (_, d)| acc + d);
    Ok(short / total)
}

/// Fraction of steps with availability in which the DER delivered less than
/// it could. Counts steps, not durations. Returns −1 for zero capacity or
/// when the DER is never available.
pub fn unused_ratio(outcome: &SimulationOutcome, der_index: usize, capacity: f64) -> f64 {
    if capacity == 0.0 {
        return -1.0;
    }
    let available = &outcome.per_der_available[der_index];
    let used = &outcome.per_der_used[der_index];
    let mut steps = 0usize;
    let mut unused = 0usize;
    for (&a, &u) in available.iter().zip(used) {
        if a > EPS_POWER {
            steps += 1;
            if u < a - EPS_POWER {
                unused += 1;
            }
        }
    }
    if steps == 0 {
        -1.0
    } else {
        unused as f64 / steps as f64
    }
}

/// Attaches the deficit ratio and per-DER unused ratios to a design.
pub fn evaluate(
    design: &MicrogridDesign,
    outcome: &SimulationOutcome,
    load: &LoadProfile,
) -> Result<EvaluatedDesign> {
    if outcome.per_der_available.len() != design.len() || outcome.per_der_used.len() != design.len() {
        return Err(Error::invalid(format!(
            "outcome covers {} DERs, design has {}",
            outcome.per_der_available.len(),
            design.len()
        )));
    }
    let deficit_ratio = deficit_ratio(outcome, load)?;
    let unused_ratios = design
        .capacities()
        .iter()
        .enumerate()
        .map(|(i, &c)| unused_ratio(outcome, i, c))
        .collect();
    Ok(EvaluatedDesign {
        design: design.clone(),
        deficit_ratio,
        unused_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, NaiveDate};

    fn load(durations: &[f64]) -> LoadProfile {
        let start = NaiveDate::from_ymd_opt(2024, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let mut t = start;
        let mut times = Vec::new();
        for d in durations {
            times.push(t);
            t += Duration::milliseconds((d * 1000.0) as i64);
        }
        LoadProfile::new(times, durations.to_vec(), vec![10.0; durations.len()]).unwrap()
    }

    fn flags(flags: &[u8]) -> SimulationOutcome {
        SimulationOutcome {
            deficit_flags: flags.iter().map(|&f| f == 1).collect(),
            per_der_available: vec![],
            per_der_used: vec![],
        }
    }

    #[test]
    fn deficit_ratio_extremes() {
        let p = load(&[240.0, 60.0, 900.0]);
        let zero = deficit_ratio(&flags(&[0, 0, 0]), &p).unwrap();
        assert_eq!(zero, 0.0);
        assert!(zero.is_sign_positive());
        assert_eq!(deficit_ratio(&flags(&[1, 1, 1]), &p).unwrap(), 1.0);
    }

    #[test]
    fn deficit_ratio_equal_weights() {
        let p = load(&[240.0; 4]);
        assert_eq!(deficit_ratio(&flags(&[1, 0, 0, 1]), &p).unwrap(), 0.5);
    }

    #[test]
    fn deficit_ratio_weights_by_duration() {
        let p = load(&[100.0, 300.0]);
        assert_eq!(deficit_ratio(&flags(&[0, 1]), &p).unwrap(), 0.75);
    }

    #[test]
    fn deficit_ratio_length_mismatch() {
        let p = load(&[240.0; 4]);
        assert!(matches!(
            deficit_ratio(&flags(&[1, 0]), &p),
            Err(Error::InvalidArgument(_))
        ));
    }

    fn usage(available: &[f64], used: &[f64]) -> SimulationOutcome {
        SimulationOutcome {
            deficit_flags: vec![false; available.len()],
            per_der_available: vec![available.to_vec()],
            per_der_used: vec![used.to_vec()],
        }
    }

    #[test]
    fn unused_ratio_zero_capacity_is_sentinel() {
        let o = usage(&[0.0, 5.0], &[0.0, 1.0]);
        assert_eq!(unused_ratio(&o, 0, 0.0), -1.0);
    }

    #[test]
    fn unused_ratio_counts_only_available_steps() {
        let o = usage(&[0.0, 5.0, 10.0, 10.0], &[0.0, 5.0, 10.0, 8.0]);
        assert_eq!(unused_ratio(&o, 0, 10.0), 1.0 / 3.0);
    }

    #[test]
    fn unused_ratio_fully_utilized_is_zero() {
        let o = usage(&[0.0, 5.0, 10.0], &[0.0, 5.0, 10.0]);
        assert_eq!(unused_ratio(&o, 0, 10.0), 0.0);
    }

    #[test]
    fn unused_ratio_never_available_is_sentinel() {
        let o = usage(&[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(unused_ratio(&o, 0, 10.0), -1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn deficit_ratio_is_scale_invariant(
                steps in proptest::collection::vec((1.0f64..3600.0, any::<bool>()), 1..60),
                scale in 0.01f64..100.0,
            ) {
                let durations: Vec<f64> = steps.iter().map(|s| s.0).collect();
                let outcome = SimulationOutcome {
                    deficit_flags: steps.iter().map(|s| s.1).collect(),
                    per_der_available: vec![],
                    per_der_used: vec![],
                };
                let base = deficit_ratio(&outcome, &load(&durations)).unwrap();
                let scaled: Vec<f64> = durations.iter().map(|d| d * scale).collect();
                let other = deficit_ratio(&outcome, &load(&scaled)).unwrap();
                prop_assert!((0.0..=1.0).contains(&base));
                prop_assert!((base - other).abs() <= 1e-12);
            }

            #[test]
            fn unused_ratio_is_a_fraction(
                pairs in proptest::collection::vec((0.0f64..100.0, 0.0f64..1.0), 1..60),
            ) {
                let available: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let used: Vec<f64> = pairs.iter().map(|p| p.0 * p.1).collect();
                let r = unused_ratio(&usage(&available, &used), 0, 50.0);
                if available.iter().any(|&a| a > EPS_POWER) {
                    prop_assert!((0.0..=1.0).contains(&r));
                } else {
                    prop_assert_eq!(r, -1.0);
                }
            }
        }
    }
}
