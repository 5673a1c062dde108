//! The three sizing stages and the pipeline chaining them.

mod binary;
mod exhaustive;
mod local;
mod pipeline;

pub use binary::{binary_search_refine, initial_step_size};
pub use exhaustive::{exhaustive_search, ExhaustiveResult, DEFAULT_SAFETY_CAP};
pub use local::local_search;
pub use pipeline::{run_exhaustive, run_pipeline, SearchReport, StageReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Grid points per DER for the initial exhaustive stage.
    pub coarse_level_points: usize,
    /// Grid points per DER for the binary and local search stages.
    pub fine_level_points: usize,
    /// Outer passes of the binary and local searches; defaults to the DER count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_passes: Option<usize>,
    pub rng_seed: u64,
    /// Final designs with a larger deficit ratio are dropped.
    pub deficit_display_threshold: f64,
    /// Largest Cartesian product the exhaustive stage will enumerate.
    pub safety_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            coarse_level_points: 6,
            fine_level_points: 11,
            outer_passes: None,
            rng_seed: 0,
            deficit_display_threshold: 0.01,
            safety_cap: DEFAULT_SAFETY_CAP,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_level_points < 2 {
            return Err(Error::invalid("coarse_level_points must be at least 2"));
        }
        if self.fine_level_points < self.coarse_level_points {
            return Err(Error::invalid(format!(
                "fine_level_points ({}) must be >= coarse_level_points ({})",
                self.fine_level_points, self.coarse_level_points
            )));
        }
        if self.outer_passes == Some(0) {
            return Err(Error::invalid("outer_passes must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.deficit_display_threshold) {
            return Err(Error::invalid("deficit_display_threshold must be within [0, 1]"));
        }
        Ok(())
    }

    pub fn passes(&self, der_count: usize) -> usize {
        self.outer_passes.unwrap_or(der_count)
    }
}
