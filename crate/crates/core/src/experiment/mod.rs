//! Run recipes, the architecture sweep families, and the training orchestrator.

pub mod config;
pub mod result;
pub mod run;
pub mod sweeps;

pub use config::{
    build_network, measurement_schedule, ArchitectureConfig, ConfigError, DatasetConfig, ExperimentConfig,
    OptimizerConfig, PoolingInsertion, Profile, ScheduleConfig, ScheduleError, SCHEMA_VERSION,
};
pub use result::{load_run, persist_run, EpochMetrics, PersistError, RunResult, SplitReference, Timing};
pub use run::{prepare_data, run_experiment, run_on, ExperimentError, PreparedData, Progress, RunOptions, DPI_TOLERANCE};
pub use sweeps::{base_config, default_sweeps, sweep, SweepSpec, FAMILIES};
