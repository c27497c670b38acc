//! Classification protocol, baselines and measurement harnesses.

pub mod bench;
pub mod classify;
pub mod config;
pub mod experiment;
pub mod pca;
pub mod sweep;

pub use bench::{bench, bench_csv, BenchRow};
pub use classify::{accuracy, nn_classify};
pub use config::parse_experiment_config;
pub use experiment::{
    run_experiment, Classifier, DataSource, ExperimentConfig, Method, NoiseStage, Report, TrialResult,
};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use sweep::{first_decrease, parse_lambda_list, sweep, sweep_csv, SweepRow, SweepSplit};
