use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use dashmap::mapref::entry::Entry;
use dashmap::DashMap;

use crate::error::Result;
use crate::metrics;
use crate::model::{DesignKey, EvaluatedDesign, LoadProfile, MicrogridDesign};
use crate::simulator::Simulator;

/// Memoized design metrics plus a count of distinct designs simulated.
#[derive(Debug, Default)]
pub struct SimulationCache {
    entries: DashMap<DesignKey, Arc<EvaluatedDesign>>,
    simulations: AtomicUsize,
}

impl SimulationCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct capacity vectors simulated so far.
    pub fn simulations(&self) -> usize {
        self.simulations.load(Ordering::SeqCst)
    }

    pub fn get(&self, design: &MicrogridDesign) -> Option<Arc<EvaluatedDesign>> {
        self.entries.get(&design.key()).map(|e| Arc::clone(e.value()))
    }

    /// Returns cached metrics, simulating and storing them on a miss.
    ///
    /// Two workers racing on the same key may both simulate, but only the
    /// first insertion is kept and counted.
    pub fn memoized_operate(
        &self,
        simulator: &dyn Simulator,
        design: &MicrogridDesign,
        load: &LoadProfile,
    ) -> Result<Arc<EvaluatedDesign>> {
        let key = design.key();
        if let Some(hit) = self.entries.get(&key) {
            return Ok(Arc::clone(hit.value()));
        }
        let outcome = simulator.operate(design, load)?;
        let evaluated = Arc::new(metrics::evaluate(design, &outcome, load)?);
        match self.entries.entry(key) {
            Entry::Occupied(existing) => Ok(Arc::clone(existing.get())),
            Entry::Vacant(slot) => {
                self.simulations.fetch_add(1, Ordering::SeqCst);
                slot.insert(Arc::clone(&evaluated));
                Ok(evaluated)
            }
        }
    }
}

/// A simulator bound to one load profile and a shared cache.
pub struct Evaluator<'a> {
    simulator: &'a dyn Simulator,
    load: &'a LoadProfile,
    cache: SimulationCache,
}

impl<'a> Evaluator<'a> {
    pub fn new(simulator: &'a dyn Simulator, load: &'a LoadProfile) -> Self {
        Evaluator {
            simulator,
            load,
            cache: SimulationCache::new(),
        }
    }

    pub fn evaluate(&self, design: &MicrogridDesign) -> Result<Arc<EvaluatedDesign>> {
        self.cache.memoized_operate(self.simulator, design, self.load)
    }

    pub fn simulations(&self) -> usize {
        self.cache.simulations()
    }

    pub fn cache(&self) -> &SimulationCache {
        &self.cache
    }

    pub fn simulator(&self) -> &dyn Simulator {
        self.simulator
    }

    pub fn load(&self) -> &LoadProfile {
        self.load
    }
}
