//! Build the per-paper report (JSON and HTML) from a feature matrix and a
//! set of freshly trained models.

use early_citers::cli::{build_report, render_html, validate_report, ReportModel};
use early_citers::earlyciters::EcOptions;
use early_citers::features::{FeatureExtractor, FeatureOptions};
use early_citers::models::{train, Hyperparams, ModelKind};
use early_citers::study::{generate_synthetic_corpus, Baseline, SynthParams};
use early_citers::topics::{TopicModel, TopicOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(1500), 9)?.corpus()?.filter(2)?;
    let topics = TopicModel::fit(&corpus, &TopicOptions { iterations: 100, ..TopicOptions::desk(2) })?;
    let matrix = FeatureExtractor::new(&corpus, &topics, FeatureOptions::default()).extract_all()?;

    // One LR and one CART model for a three-year horizon, trained on early papers.
    let slots = Baseline::Our.slots();
    let train_rows: Vec<_> = matrix.rows.iter().filter(|r| r.meta.year <= 1995).collect();
    let x: Vec<Vec<f64>> = train_rows.iter().map(|r| r.select(&slots)).collect();
    let y: Vec<f64> = train_rows
        .iter()
        .map(|r| corpus.citations_in_window(&r.meta.paper_id, r.meta.year, r.meta.year + 3).map(|c| c as f64))
        .collect::<Result<_, _>>()?;
    let hp = Hyperparams::default();
    let trained = [(ModelKind::Lr, train(ModelKind::Lr, &x, &y, &hp, 0)?), (ModelKind::Cart, train(ModelKind::Cart, &x, &y, &hp, 0)?)];
    let models: Vec<ReportModel> =
        trained.iter().map(|(kind, model)| ReportModel { kind: *kind, delta_t: 3, model, slots: &slots }).collect();

    let id = matrix.rows.iter().find(|r| r.meta.year == 2000).map(|r| r.meta.paper_id.clone()).expect("a 2000 paper");
    let report = build_report(&corpus, &matrix, &models, &id, &EcOptions::default())?;
    let json = report.to_json()?;
    validate_report(&serde_json::from_str(&json)?)?;
    println!("{json}");

    let html = std::env::temp_dir().join(format!("report_{id}.html"));
    std::fs::write(&html, render_html(&report))?;
    eprintln!("html written to {}", html.display());
    Ok(())
}
