//! Train all four models on papers up to 1995 and evaluate them on later
//! papers, at a scale that finishes in seconds.

use early_citers::study::{generate_synthetic_corpus, run_experiment, ExperimentConfig, SynthParams};

const CONFIG: &str = r#"
train_size = 400
test_size = 150
n_test_samples = 3
delta_t_list = [3, 5, 7]
test_years = [1998, 2008]
topic_k = 10
topic_iterations = 100
seed = 7
"#;

fn main() -> early_citers::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(2000), 42)?.corpus()?.filter(2)?;
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let report = run_experiment(&corpus, &config)?;

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.write_metrics_csv(std::io::stdout().lock())?;
    Ok(())
}
