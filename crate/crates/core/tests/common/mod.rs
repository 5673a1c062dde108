#![allow(dead_code)]

use std::path::PathBuf;

use der_sizer::io::{parse_load_profile, resolve_bounds, PipelineConfigFile};
use der_sizer::{DesignSpace, LoadProfile, ReferenceSimulator, SearchConfig};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// A shipped config with its load and the reference simulator.
pub struct Instance {
    pub config: PipelineConfigFile,
    pub load: LoadProfile,
    pub space: DesignSpace,
    pub simulator: ReferenceSimulator,
}

impl Instance {
    pub fn open(config: &str) -> Self {
        let config = PipelineConfigFile::load(&data(config)).expect("config");
        let text = std::fs::read_to_string(&config.load_path).expect("load file");
        let load = parse_load_profile(&text).expect("load profile");
        let space = resolve_bounds(&config, &load).expect("bounds");
        let simulator = ReferenceSimulator::new(space.clone(), config.dispatch.clone()).expect("simulator");
        Instance {
            config,
            load,
            space,
            simulator,
        }
    }

    /// Diesel, PV and battery against one noise-free day at half-hour steps.
    pub fn desk() -> Self {
        Self::open("desk.json")
    }

    pub fn search(&self) -> SearchConfig {
        self.config.search.clone()
    }
}

/// Counts random (design, single-capacity increase) pairs where the deficit
/// ratio rises.
pub fn monotonicity_violations(inst: &Instance, cases: usize, seed: u64) -> usize {
    use der_sizer::{deficit_ratio, MicrogridDesign, Simulator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ders = inst.space.ders();
    let ratio = |d: &MicrogridDesign| {
        let outcome = inst.simulator.operate(d, &inst.load).expect("simulation");
        deficit_ratio(&outcome, &inst.load).expect("ratio")
    };
    (0..cases)
        .filter(|_| {
            let caps: Vec<f64> = ders
                .iter()
                .map(|d| rng.random_range(d.lower_bound..=d.upper_bound))
                .collect();
            let i = rng.random_range(0..ders.len());
            let raised = rng.random_range(caps[i]..=ders[i].upper_bound);
            let base = MicrogridDesign::new(caps);
            ratio(&base.with_capacity(i, raised)) > ratio(&base)
        })
        .count()
}
