//! Ensembles, persistence and scaling analysis.

pub mod config;
pub mod ensemble;
pub mod fit;
pub mod fss;
pub mod persist;
pub mod series;

pub use config::{run_sweep, SweepConfig};
pub use ensemble::{
    parse_observables, run_ensemble, trajectory_row, Aggregates, AnnealConfig, EnsembleOptions, EnsembleResult,
    Observable, Row, Stat, SCHEMA_VERSION,
};
pub use fit::{power_law_fit, FitForm, ScalingFit};
pub use fss::{collapse_quality, crossing_estimate, crossings, fss_collapse, CollapseResult, ScalingPoint};
pub use persist::{canonical_jsonl, load, merge_shards, persist, read_rows, read_rows_from, write_rows, Summary};
pub use series::{infer_parameter, scaling_points, size_series, Parameter};
