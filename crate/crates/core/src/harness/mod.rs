//! Experiment scheduling and output.
//!
//! Each run of an experiment gets its own seed from
//! [`derive_seed`](crate::rng::derive_seed)`(base_seed, grid_index,
//! run_index)`; that seed drives the run's search and, when they are redrawn
//! per run, its network and landscape. Runs execute in parallel and are
//! collected in run order, so output files are reproducible byte for byte.

mod emit;
mod run;
mod spec;

pub use crate::rng::derive_seed;
pub use emit::{emit, format_real, from_json, render, to_csv, to_json, Format, CSV_HEADER};
pub use run::{
    build_network, run_experiment, run_sweep, ExperimentOutput, LandscapeRecord, NetworkRecord,
    SweepRow,
};
pub use spec::{
    hierarchy_levels, parse_grid, ExperimentKind, ExperimentSpec, LandscapeSeed, Topology,
    DEFAULT_LANDSCAPE_SEED,
};
