//! Halving search along one DER at a time on the fine grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dominance::dedupe;
use crate::error::{Error, Result};
use crate::grid::DesignGrids;
use crate::model::{DesignSpace, EvaluatedDesign};
use crate::simulator::Evaluator;

/// Largest power of two not exceeding `n_intervals`.
pub fn initial_step_size(n_intervals: usize) -> Result<usize> {
    if n_intervals < 1 {
        return Err(Error::invalid("step size needs at least one interval"));
    }
    Ok(1 << (usize::BITS - 1 - n_intervals.leading_zeros()))
}

/// Refines every seed on the fine grid and returns the seeds followed by
/// every design simulated along the way, deduplicated.
///
/// Each seed gets its own random stream derived from `rng_seed` and the
/// seed's position, so results do not depend on scheduling.
pub fn binary_search_refine(
    eval: &Evaluator<'_>,
    space: &DesignSpace,
    fine_level_points: usize,
    seeds: &[EvaluatedDesign],
    outer_passes: usize,
    rng_seed: u64,
) -> Result<Vec<EvaluatedDesign>> {
    let grids = DesignGrids::new(space, fine_level_points)?;
    let per_seed = seeds
        .par_iter()
        .enumerate()
        .map(|(k, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(k as u64);
            refine_seed(eval, &grids, seed, outer_passes, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(dedupe(seeds.iter().cloned().chain(per_seed.into_iter().flatten())))
}

fn refine_seed(
    eval: &Evaluator<'_>,
    grids: &DesignGrids,
    seed: &EvaluatedDesign,
    outer_passes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<EvaluatedDesign>> {
    let start = grids.nearest_levels(&seed.design);
    let start_eval = eval.evaluate(&grids.design_at(&start))?;
    let mut out = vec![(*start_eval).clone()];
    let mut order: Vec<usize> = (0..grids.len()).collect();

    for _ in 0..outer_passes {
        let mut decrease = start_eval.deficit_ratio == 0.0;
        let mut current = start.clone();
        let mut current_ratio = start_eval.deficit_ratio;
        order.shuffle(rng);
        for &der in &order {
            let top = grids.get(der).intervals();
            let mut step = initial_step_size(top)?;
            while step >= 1 {
                loop {
                    let level = current[der];
                    let next = if decrease {
                        level.saturating_sub(step)
                    } else {
                        (level + step).min(top)
                    };
                    if next == level {
                        if !decrease && current_ratio == 0.0 {
                            decrease = true;
                        }
                        break;
                    }
                    let mut candidate = current.clone();
                    candidate[der] = next;
                    let evaluated = eval.evaluate(&grids.design_at(&candidate))?;
                    out.push((*evaluated).clone());
                    if evaluated.deficit_ratio > current_ratio {
                        break;
                    }
                    current = candidate;
                    current_ratio = evaluated.deficit_ratio;
                }
                step /= 2;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MicrogridDesign;
    use crate::search::testing::{constant_load, diesels, Firm};

    fn seed(eval: &Evaluator<'_>, caps: &[f64]) -> EvaluatedDesign {
        (*eval.evaluate(&MicrogridDesign::new(caps.to_vec())).unwrap()).clone()
    }

    #[test]
    fn step_sizes_are_powers_of_two() {
        assert_eq!(initial_step_size(10).unwrap(), 8);
        assert_eq!(initial_step_size(160).unwrap(), 128);
        assert_eq!(initial_step_size(1).unwrap(), 1);
        assert_eq!(initial_step_size(16).unwrap(), 16);
        assert!(initial_step_size(0).is_err());
    }

    #[test]
    fn single_der_halving_trace() {
        let load = constant_load(55.0, 2);
        let eval = Evaluator::new(&Firm, &load);
        let space = diesels(&[100.0]);
        let s = seed(&eval, &[100.0]);
        let out = binary_search_refine(&eval, &space, 11, &[s], 1, 0).unwrap();
        let caps: Vec<f64> = out.iter().map(|e| e.capacities()[0]).collect();
        // 100 -> 20 rejected; 100 -> 60 accepted, 60 -> 20 rejected;
        // 60 -> 40 rejected; 60 -> 50 rejected.
        assert_eq!(caps, vec![100.0, 20.0, 60.0, 40.0, 50.0]);
        let best = out.iter().filter(|e| !e.has_deficit()).map(|e| e.capacities()[0]);
        assert_eq!(best.fold(f64::INFINITY, f64::min), 60.0);
    }

    #[test]
    fn seed_at_lower_bounds_produces_nothing_new() {
        let load = constant_load(0.0, 2);
        let eval = Evaluator::new(&Firm, &load);
        let space = diesels(&[100.0, 50.0]);
        let s = seed(&eval, &[0.0, 0.0]);
        let out = binary_search_refine(&eval, &space, 11, &[s], 2, 9).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(eval.simulations(), 1);
    }

    #[test]
    fn deficit_seed_climbs_then_turns_around() {
        let load = constant_load(55.0, 2);
        let eval = Evaluator::new(&Firm, &load);
        let space = diesels(&[100.0]);
        let s = seed(&eval, &[0.0]);
        let out = binary_search_refine(&eval, &space, 11, &[s], 1, 0).unwrap();
        let caps: Vec<f64> = out.iter().map(|e| e.capacities()[0]).collect();
        // Up by 8 levels to 80, clamp at 100 and turn; then 100 -> 60,
        // 60 -> 20, 60 -> 40 and 60 -> 50 rejected.
        assert_eq!(caps, vec![0.0, 80.0, 100.0, 60.0, 20.0, 40.0, 50.0]);
    }

    #[test]
    fn off_grid_seed_is_snapped() {
        let load = constant_load(0.0, 1);
        let eval = Evaluator::new(&Firm, &load);
        let space = diesels(&[100.0]);
        let s = seed(&eval, &[24.0]);
        let out = binary_search_refine(&eval, &space, 11, &[s], 1, 0).unwrap();
        assert_eq!(out[0].capacities(), &[24.0]);
        assert_eq!(out[1].capacities(), &[20.0]);
    }

    #[test]
    fn seeded_runs_repeat_exactly() {
        let load = constant_load(90.0, 2);
        let space = diesels(&[60.0, 60.0, 60.0]);
        let run = |rng_seed| {
            let eval = Evaluator::new(&Firm, &load);
            let seeds: Vec<_> = [[60.0, 60.0, 60.0], [36.0, 24.0, 60.0], [0.0, 0.0, 12.0]]
                .iter()
                .map(|c| seed(&eval, c))
                .collect();
            binary_search_refine(&eval, &space, 21, &seeds, 3, rng_seed).unwrap()
        };
        assert_eq!(run(42), run(42));
    }
}
