//! Exhaustive enumeration of a capacity grid with dominance pruning.
//!
//! Candidates are visited from the largest capacities down. A candidate is
//! skipped when raising any single DER one level gives a design already
//! known to fall short; otherwise it is simulated. Candidates are processed
//! in waves of equal total level so that every wave can be simulated in
//! parallel while producing the same result as the sequential order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::DesignGrids;
use crate::model::{DesignSpace, EvaluatedDesign, MicrogridDesign};
use crate::simulator::Evaluator;

pub const DEFAULT_SAFETY_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    /// Simulated designs in enumeration order.
    pub simulated: Vec<EvaluatedDesign>,
    /// Designs skipped because a one-level-larger neighbor fell short.
    pub pruned: Vec<MicrogridDesign>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pending,
    Met,
    Short,
    Pruned,
}

impl Status {
    fn in_deficit_set(self) -> bool {
        matches!(self, Status::Short | Status::Pruned)
    }
}

struct MixedRadix {
    radices: Vec<usize>,
    strides: Vec<usize>,
}

impl MixedRadix {
    /// The first DER is the most significant digit.
    fn new(radices: Vec<usize>) -> Self {
        let mut strides = vec![1; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        MixedRadix { radices, strides }
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (i, stride) in self.strides.iter().enumerate() {
            out[i] = index / stride;
            index %= stride;
        }
    }
}

pub fn exhaustive_search(
    eval: &Evaluator<'_>,
    space: &DesignSpace,
    level_points: usize,
    safety_cap: u64,
) -> Result<ExhaustiveResult> {
    let grids = DesignGrids::new(space, level_points)?;
    let size = grids.product_size();
    if size > safety_cap as u128 || size > usize::MAX as u128 {
        return Err(Error::SafetyCap { size, cap: safety_cap });
    }
    let total = size as usize;
    let radix = MixedRadix::new(grids.grids().iter().map(|g| g.points().len()).collect());
    let top: Vec<usize> = radix.radices.iter().map(|r| r - 1).collect();
    let max_depth: usize = top.iter().sum();

    // Bucket candidates by depth (levels below the upper corner); within a
    // bucket, keep descending enumeration order.
    let mut levels = vec![0usize; grids.len()];
    let mut depth_of = Vec::with_capacity(total);
    let mut bucket_sizes = vec![0usize; max_depth + 1];
    for index in 0..total {
        radix.digits(index, &mut levels);
        let depth: usize = top.iter().zip(&levels).map(|(t, l)| t - l).sum();
        depth_of.push(depth as u32);
        bucket_sizes[depth] += 1;
    }
    let mut waves: Vec<Vec<usize>> = bucket_sizes.iter().map(|&n| Vec::with_capacity(n)).collect();
    for index in (0..total).rev() {
        waves[depth_of[index] as usize].push(index);
    }
    drop(depth_of);

    let mut status = vec![Status::Pending; total];
    let mut simulated: Vec<(usize, EvaluatedDesign)> = Vec::new();
    for wave in &waves {
        let mut to_simulate = Vec::new();
        for &index in wave {
            radix.digits(index, &mut levels);
            let pruned = (0..levels.len()).any(|i| {
                levels[i] < top[i] && status[index + radix.strides[i]].in_deficit_set()
            });
            if pruned {
                status[index] = Status::Pruned;
            } else {
                to_simulate.push(index);
            }
        }
        let evaluated = to_simulate
            .par_iter()
            .map(|&index| {
                let mut digits = vec![0usize; radix.radices.len()];
                radix.digits(index, &mut digits);
                let design = grids.design_at(&digits);
                eval.evaluate(&design).map(|e| (index, (*e).clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        for (index, e) in evaluated {
            status[index] = if e.has_deficit() { Status::Short } else { Status::Met };
            simulated.push((index, e));
        }
    }

    simulated.sort_by_key(|entry| std::cmp::Reverse(entry.0));
    let pruned = (0..total)
        .rev()
        .filter(|&index| status[index] == Status::Pruned)
        .map(|index| {
            radix.digits(index, &mut levels);
            grids.design_at(&levels)
        })
        .collect();
    Ok(ExhaustiveResult {
        simulated: simulated.into_iter().map(|(_, e)| e).collect(),
        pruned,
    })
}
