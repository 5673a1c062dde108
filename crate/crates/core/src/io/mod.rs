//! File formats: load and wind series, run configuration, result tables.

mod config;
mod load;
mod report;
mod synth;

pub use config::{
    resolve_bounds, round_up, DerEntry, PipelineConfigFile, DEFAULT_CAPACITY_PRECISION,
    DEFAULT_STORAGE_RATIO_HOURS,
};
pub use load::{load_profile_csv, parse_load_profile, parse_timestamp, parse_wind_series};
pub use report::{
    format_capacity, format_ratio, parse_results_csv, render, render_csv, render_json, write_atomic,
    write_report, Format, JsonDer, JsonReport, ResultColumns, ResultRow, DEFICIT_COLUMN,
};
pub use synth::SyntheticLoad;
