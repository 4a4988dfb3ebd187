//! Empirical analyses, the prediction experiment, and synthetic corpora.

mod correlation;
mod experiment;
mod synth;

pub use correlation::{
    bucketed_correlation_study, correlation_study, correlation_table, example_pairs, feature_cross_correlation,
    mine_example_pairs, write_pairs_csv, CorrelationRow, CorrelationTable, CrossCorrelation, ExamplePair, Property,
    RowStatus, BUCKETED_DELTA_TS, CORRELATION_DELTA_TS, MIN_SUBSET,
};
pub use synth::{generate_synthetic_corpus, SynthCorpus, SynthParams};
pub use experiment::{
    baseline_features, delta_sensitivity, evaluate_models, feature_ranking, leakage_check, probe_leakage, rank_features, run_experiment,
    run_experiment_with_topics, sample_split, train_models, train_models_with, evaluate_models_with, write_ranking_csv, write_sensitivity_csv, Baseline,
    EvalRow, EvaluationReport, ExperimentConfig, ExperimentSplit, FeatureIndex, MetricSummary, ModelEntry,
    RankedFeature, ScatterPoint, SensitivityCell, TargetFn, LEAKAGE_PROBES, SENSITIVITY_DELTAS, SENSITIVITY_DELTA_TS,
};
