mod common;

use std::sync::OnceLock;

use common::{monotonicity_violations, Instance};
use der_sizer::io::SyntheticLoad;
use der_sizer::{deficit_ratio, MicrogridDesign, ReferenceSimulator, SimulationOutcome, Simulator};
use proptest::prelude::*;

fn desk() -> &'static Instance {
    static DESK: OnceLock<Instance> = OnceLock::new();
    DESK.get_or_init(Instance::desk)
}

fn run(inst: &Instance, caps: &[f64]) -> SimulationOutcome {
    inst.simulator
        .operate(&MicrogridDesign::new(caps.to_vec()), &inst.load)
        .unwrap()
}

#[test]
fn random_capacity_increases_never_raise_deficit() {
    assert_eq!(monotonicity_violations(desk(), 200, 11), 0);
}

#[test]
fn monotone_on_a_noisy_fine_grained_day() {
    let mut inst = Instance::desk();
    inst.load = SyntheticLoad {
        steps: 48,
        step_seconds: 240,
        ..SyntheticLoad::one_day(120.0, 5)
    }
    .generate()
    .unwrap();
    inst.simulator = ReferenceSimulator::new(inst.space.clone(), inst.config.dispatch.clone()).unwrap();
    assert_eq!(monotonicity_violations(&inst, 200, 12), 0);
}

#[test]
fn upper_bounds_meet_desk_demand() {
    let inst = desk();
    let caps = inst.space.upper_bounds().capacities().to_vec();
    assert_eq!(deficit_ratio(&run(inst, &caps), &inst.load).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raising_capacity_never_adds_a_deficit_step(
        fractions in prop::collection::vec(0.0f64..=1.0, 3),
        der in 0usize..3,
        extra in 0.0f64..=1.0,
    ) {
        let inst = desk();
        let ders = inst.space.ders();
        let caps: Vec<f64> = ders.iter().zip(&fractions).map(|(d, f)| d.upper_bound * f).collect();
        let mut raised = caps.clone();
        raised[der] += (ders[der].upper_bound - caps[der]) * extra;
        let before = run(inst, &caps);
        let after = run(inst, &raised);
        for (b, a) in before.deficit_flags.iter().zip(&after.deficit_flags) {
            prop_assert!(*b || !*a);
        }
    }

    #[test]
    fn zero_deficit_is_upward_closed(
        fractions in prop::collection::vec(0.0f64..=1.0, 3),
        raise in prop::collection::vec(0.0f64..=1.0, 3),
    ) {
        let inst = desk();
        let ders = inst.space.ders();
        let caps: Vec<f64> = ders.iter().zip(&fractions).map(|(d, f)| d.upper_bound * f).collect();
        prop_assume!(deficit_ratio(&run(inst, &caps), &inst.load).unwrap() == 0.0);
        let raised: Vec<f64> = ders
            .iter()
            .zip(caps.iter().zip(&raise))
            .map(|(d, (c, r))| c + (d.upper_bound - c) * r)
            .collect();
        prop_assert_eq!(deficit_ratio(&run(inst, &raised), &inst.load).unwrap(), 0.0);
    }

    #[test]
    fn used_never_exceeds_available(fractions in prop::collection::vec(0.0f64..=1.0, 3)) {
        let inst = desk();
        let caps: Vec<f64> = inst.space.ders().iter().zip(&fractions).map(|(d, f)| d.upper_bound * f).collect();
        let outcome = run(inst, &caps);
        for (avail, used) in outcome.per_der_available.iter().zip(&outcome.per_der_used) {
            for (a, u) in avail.iter().zip(used) {
                prop_assert!(*u <= *a + 1e-9);
            }
        }
    }
}
