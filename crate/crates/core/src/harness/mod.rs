//! Experiment orchestration: configuration, training and evaluation runs,
//! comparison tables, trajectory export and the files they write.

mod checkpoint;
mod config;
mod metrics;
mod run;

pub use checkpoint::Checkpoint;
pub use config::ExperimentConfig;
pub use metrics::{
    probe_convergence, read_records, write_curve, write_probes, write_records, EpisodeRecord,
    MetricsReport,
};
pub use run::{
    actuation, comparison_text, evaluate, evaluate_policy, export_trace, load_policy, rollout,
    run_comparison, run_evaluation, run_trace, run_training, train_method, write_comparison_csv,
    write_metrics, ComparisonRow, Evaluation, TrainedPolicy, TrainingRun, CHECKPOINT_FILE,
    COMPARISON_HEADERS, CONFIG_FILE, CURVE_FILE, EPISODES_FILE, HASH_FILE, METRICS_FILE,
    PROBES_FILE, TRACE_FILE,
};
