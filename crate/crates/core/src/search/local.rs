//! One-level-at-a-time descent from designs that meet demand.

use rayon::prelude::*;

use crate::dominance::dedupe;
use crate::error::Result;
use crate::grid::DesignGrids;
use crate::model::{DesignSpace, EvaluatedDesign};
use crate::simulator::Evaluator;

/// Lowers each DER of every deficit-free seed one fine level at a time until
/// the bound is reached or a deficit appears. Returns the seeds followed by
/// every design simulated along the way, deduplicated.
pub fn local_search(
    eval: &Evaluator<'_>,
    space: &DesignSpace,
    fine_level_points: usize,
    seeds: &[EvaluatedDesign],
    outer_passes: usize,
) -> Result<Vec<EvaluatedDesign>> {
    let grids = DesignGrids::new(space, fine_level_points)?;
    let per_seed = seeds
        .par_iter()
        .map(|seed| descend(eval, &grids, seed, outer_passes))
        .collect::<Result<Vec<_>>>()?;
    Ok(dedupe(seeds.iter().cloned().chain(per_seed.into_iter().flatten())))
}

fn descend(
    eval: &Evaluator<'_>,
    grids: &DesignGrids,
    seed: &EvaluatedDesign,
    outer_passes: usize,
) -> Result<Vec<EvaluatedDesign>> {
    let mut out = Vec::new();
    if eval.evaluate(&seed.design)?.has_deficit() {
        return Ok(out);
    }
    let mut current = seed.design.clone();
    for _ in 0..outer_passes {
        for der in 0..grids.len() {
            loop {
                let capacity = current.capacities()[der];
                let lower = grids.get(der).level_below(capacity);
                if lower == capacity {
                    break;
                }
                let candidate = current.with_capacity(der, lower);
                let evaluated = eval.evaluate(&candidate)?;
                out.push((*evaluated).clone());
                if evaluated.has_deficit() {
                    break;
                }
                current = candidate;
            }
        }
    }
    Ok(out)
}
