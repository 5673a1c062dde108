use std::time::{Duration, Instant};

use log::info;
use serde::{Deserialize, Serialize};

use crate::dominance::{dedupe, non_dominated};
use crate::error::Result;
use crate::model::{DesignSpace, EvaluatedDesign, LoadProfile};
use crate::search::{binary_search_refine, exhaustive_search, local_search, SearchConfig};
use crate::simulator::{Evaluator, Simulator};

/// Simulation and design counts for one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    /// Distinct designs first simulated during this stage.
    pub simulations: usize,
    /// Designs the stage handed to the next one.
    pub designs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub final_designs: Vec<EvaluatedDesign>,
    pub all_simulated: usize,
    pub stages: Vec<StageReport>,
    pub elapsed: Duration,
    pub seed: u64,
}

impl SearchReport {
    /// Everything except wall time, for determinism checks.
    pub fn same_outcome(&self, other: &SearchReport) -> bool {
        self.final_designs == other.final_designs
            && self.all_simulated == other.all_simulated
            && self.stages == other.stages
            && self.seed == other.seed
    }
}

fn stage(name: &str, eval: &Evaluator<'_>, before: usize, designs: usize) -> StageReport {
    let simulations = eval.simulations() - before;
    info!("{name}: {simulations} new simulations, {designs} designs");
    StageReport {
        stage: name.to_string(),
        simulations,
        designs,
    }
}

fn display(designs: Vec<EvaluatedDesign>, threshold: f64) -> Vec<EvaluatedDesign> {
    non_dominated(dedupe(designs))
        .into_iter()
        .filter(|e| e.deficit_ratio <= threshold)
        .collect()
}

/// Coarse exhaustive search, binary search refinement on the fine grid, then
/// local descent from the non-dominated refined designs.
pub fn run_pipeline(
    simulator: &dyn Simulator,
    space: &DesignSpace,
    load: &LoadProfile,
    config: &SearchConfig,
) -> Result<SearchReport> {
    config.validate()?;
    let started = Instant::now();
    let eval = Evaluator::new(simulator, load);
    let passes = config.passes(space.len());
    let mut stages = Vec::with_capacity(3);

    let before = eval.simulations();
    let initial = exhaustive_search(&eval, space, config.coarse_level_points, config.safety_cap)?.simulated;
    stages.push(stage("exhaustive", &eval, before, initial.len()));

    let before = eval.simulations();
    let refined = binary_search_refine(
        &eval,
        space,
        config.fine_level_points,
        &initial,
        passes,
        config.rng_seed,
    )?;
    stages.push(stage("binary", &eval, before, refined.len()));

    let before = eval.simulations();
    let frontier = non_dominated(refined);
    let polished = local_search(&eval, space, config.fine_level_points, &frontier, passes)?;
    stages.push(stage("local", &eval, before, polished.len()));

    let final_designs = display(polished, config.deficit_display_threshold);
    info!(
        "{} final designs from {} simulations",
        final_designs.len(),
        eval.simulations()
    );
    Ok(SearchReport {
        final_designs,
        all_simulated: eval.simulations(),
        stages,
        elapsed: started.elapsed(),
        seed: config.rng_seed,
    })
}

/// Exhaustive search alone at `level_points`, filtered like the pipeline.
pub fn run_exhaustive(
    simulator: &dyn Simulator,
    space: &DesignSpace,
    load: &LoadProfile,
    level_points: usize,
    config: &SearchConfig,
) -> Result<SearchReport> {
    let started = Instant::now();
    let eval = Evaluator::new(simulator, load);
    let simulated = exhaustive_search(&eval, space, level_points, config.safety_cap)?.simulated;
    let stages = vec![stage("exhaustive", &eval, 0, simulated.len())];
    Ok(SearchReport {
        final_designs: display(simulated, config.deficit_display_threshold),
        all_simulated: eval.simulations(),
        stages,
        elapsed: started.elapsed(),
        seed: config.rng_seed,
    })
}
