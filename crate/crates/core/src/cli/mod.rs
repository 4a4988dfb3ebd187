//! Command-line front end. Every subcommand loads its inputs from the
//! workspace, calls one library operation and writes the result back.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.

mod report;
mod workspace;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use report::{build_report, render_html, validate_report, Citer, EcSection, PaperInfo, PaperReport, Prediction, ReportModel};
pub use workspace::Workspace;

use crate::corpus::{Corpus, IngestOptions, IngestSources, PaperIdx, Year};
use crate::earlyciters::{EcOptions, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureMatrix, FeatureOptions, FeatureSlot};
use crate::graphs::{self, PageRankOptions};
use crate::models::TrainedModel;
use crate::study::{self, ExperimentConfig, ExperimentSplit, FeatureIndex, ModelEntry, Property, SynthParams};
use crate::topics::{TopicModel, TopicOptions};
use workspace as ws;

#[derive(Parser, Debug)]
#[command(name = "early-citers", version, about = "Early-citer analytics and citation-count prediction")]
struct Cli {
    /// Directory holding every artifact.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read line-delimited JSON streams into a corpus snapshot.
    Ingest(IngestArgs),
    /// Keep papers with at least one citation in their early window.
    Filter {
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: i32,
    },
    /// Export citation, co-authorship and venue graphs with PageRank scores.
    Graphs {
        /// Slice year for the co-authorship graph; defaults to the horizon.
        #[arg(long)]
        year: Option<Year>,
    },
    /// Fit the topic model.
    Topics(TopicArgs),
    /// Extract the feature matrix for every retained paper.
    Features {
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: i32,
    },
    /// Sample the split and train one model per kind and Δt.
    Train(TrainArgs),
    /// Evaluate trained models on the sampled test sets.
    Evaluate,
    /// Correlation studies, example pairs, rankings and sensitivity.
    Study(StudyArgs),
    /// Write a per-paper report.
    Report(ReportArgs),
    /// Generate a synthetic corpus with a planted early-citer effect.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    papers: PathBuf,
    #[arg(long)]
    authors: Option<PathBuf>,
    #[arg(long)]
    venues: Option<PathBuf>,
    #[arg(long)]
    contexts: Option<PathBuf>,
    /// Snapshot path, relative to the workspace.
    #[arg(long, default_value = ws::CORPUS)]
    out: PathBuf,
    #[arg(long, default_value_t = IngestOptions::default().year_min)]
    year_min: Year,
    #[arg(long, default_value_t = IngestOptions::default().year_max)]
    year_max: Year,
}

#[derive(Args, Debug)]
struct TopicArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    #[arg(long, default_value_t = 5)]
    min_df: usize,
    /// Fit only on papers published up to this year.
    #[arg(long)]
    max_year: Option<Year>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    seed: u64,
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<i32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StudyKind {
    Correlation,
    Bucketed,
    Pairs,
    Ranking,
    Crosscorr,
    Sensitivity,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[arg(long, value_enum)]
    kind: StudyKind,
    #[arg(long, default_value = "PC")]
    property: Property,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: i32,
    /// Δt for pairs (default 5) and ranking (default 3).
    #[arg(long)]
    delta_t: Option<i32>,
    /// Required for ranking and sensitivity.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Html,
    Both,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    paper: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Both)]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    stealing: f64,
    #[arg(long, default_value_t = 5000)]
    papers: usize,
    #[arg(long)]
    authors: Option<usize>,
    #[arg(long)]
    influence_fraction: Option<f64>,
    #[arg(long)]
    bucket2_boost: Option<f64>,
    /// Directory for the JSONL streams, relative to the workspace.
    #[arg(long, default_value = "synth")]
    streams: PathBuf,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
}
use Failure::{Domain, Usage};

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Domain(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn execute(cli: Cli) -> CliResult {
    let w = Workspace::new(&cli.workspace);
    let _lock = w.lock()?;
    match cli.command {
        Command::Ingest(a) => ingest(&w, a),
        Command::Filter { delta } => filter(&w, delta),
        Command::Graphs { year } => export_graphs(&w, year),
        Command::Topics(a) => topics(&w, a),
        Command::Features { delta } => features(&w, delta),
        Command::Train(a) => train(&w, a),
        Command::Evaluate => evaluate(&w),
        Command::Study(a) => run_study(&w, a),
        Command::Report(a) => report(&w, a),
        Command::Synth(a) => synth(&w, a),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(bytes: &[u8]) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(bytes).and_then(|_| out.flush());
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    emit(s.as_bytes());
    Ok(())
}

fn save_json<T: Serialize>(w: &Workspace, rel: &str, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    w.write_string(rel, &s)
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn ingest(w: &Workspace, a: IngestArgs) -> CliResult {
    let sources = IngestSources {
        papers: a.papers,
        authors: a.authors,
        venues: a.venues,
        contexts: a.contexts,
    };
    let opts = IngestOptions {
        year_min: a.year_min,
        year_max: a.year_max,
    };
    let corpus = Corpus::ingest_files(&sources, &opts)?;
    corpus.save(&w.path(&a.out))?;
    print_json(&corpus.stats())?;
    Ok(())
}

fn load_filtered(w: &Workspace) -> Result<Corpus> {
    Corpus::load(&w.require(ws::FILTERED, "filter")?)
}

fn filter(w: &Workspace, delta: i32) -> CliResult {
    let corpus = Corpus::load(&w.require(ws::CORPUS, "ingest")?)?;
    let filtered = corpus.filter(delta)?;
    filtered.save(&w.path(ws::FILTERED))?;
    print_json(&filtered.stats())?;
    Ok(())
}

fn write_scores(w: &Workspace, rel: &str, g: &graphs::DiGraph, label: impl Fn(u32) -> String) -> Result<()> {
    let scores = graphs::pagerank(g, &PageRankOptions::default())?;
    let mut out = csv::Writer::from_writer(w.create(rel)?);
    let fail = |e: csv::Error| Error::Format(e.to_string());
    out.write_record(["id", "pagerank"]).map_err(fail)?;
    for node in 0..g.len() {
        out.write_record([label(g.key(node)), format!("{:.12e}", scores.get(node))]).map_err(fail)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}

fn export_graphs(w: &Workspace, year: Option<Year>) -> CliResult {
    let corpus = load_filtered(w)?;
    let paper = |k: u32| corpus.paper_id(PaperIdx(k)).to_string();
    let venue = |k: u32| corpus.venue(crate::corpus::VenueIdx(k)).id.clone();

    let citation = graphs::build_citation_graph(&corpus);
    let rel = "graphs/citation.tsv";
    citation.write_edge_list(w.create(rel)?, paper).map_err(|e| Error::io(rel, e))?;
    write_scores(w, "graphs/citation_pagerank.csv", &citation, paper)?;

    let venues = graphs::build_venue_graph(&corpus);
    let rel = "graphs/venue.tsv";
    venues.write_edge_list(w.create(rel)?, venue).map_err(|e| Error::io(rel, e))?;
    write_scores(w, "graphs/venue_pagerank.csv", &venues, venue)?;

    let as_of = year.or(corpus.horizon()).unwrap_or(0);
    let co = graphs::build_coauthorship_graph(&corpus, as_of);
    let rel = "graphs/coauthor.tsv";
    co.write_edge_list(w.create(rel)?, |a| corpus.author_id(a).to_string())
        .map_err(|e| Error::io(rel, e))?;
    print_json(&serde_json::json!({
        "citation": {"nodes": citation.len(), "edges": citation.edge_count()},
        "venue": {"nodes": venues.len(), "edges": venues.edge_count()},
        "coauthor": {"as_of": as_of, "nodes": co.len(), "edges": co.edge_count()},
    }))?;
    Ok(())
}

fn topics(w: &Workspace, a: TopicArgs) -> CliResult {
    let corpus = load_filtered(w)?;
    let opts = TopicOptions {
        k: a.k,
        iterations: a.iterations,
        min_df: a.min_df,
        seed: a.seed,
        max_year: a.max_year,
        ..Default::default()
    };
    let model = TopicModel::fit(&corpus, &opts)?;
    model.save(&w.path(ws::TOPICS))?;
    let top: Vec<String> = (0..model.k()).map(|t| model.top_words(t, 8).join(" ")).collect();
    print_json(&serde_json::json!({"k": model.k(), "vocabulary": model.vocabulary().len(), "top_words": top}))?;
    Ok(())
}

fn features(w: &Workspace, delta: i32) -> CliResult {
    let corpus = load_filtered(w)?;
    let model = TopicModel::load(&w.require(ws::TOPICS, "topics")?)?;
    let matrix = FeatureExtractor::new(&corpus, &model, FeatureOptions::with_delta(delta)).extract_all()?;
    matrix.save(&w.path(ws::FEATURES))?;
    matrix.write_csv(w.create(ws::FEATURES_CSV)?)?;
    print_json(&serde_json::json!({"rows": matrix.len(), "delta": delta}))?;
    Ok(())
}

/// What `train` leaves for `evaluate` and `report`.
#[derive(Serialize, Deserialize)]
struct ExperimentState {
    config: ExperimentConfig,
    split: ExperimentSplit,
    models: Vec<String>,
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    path.map_or_else(|| Ok(ExperimentConfig::default()), ExperimentConfig::load)
}

fn load_features(w: &Workspace, delta: i32) -> Result<FeatureMatrix> {
    let m = FeatureMatrix::load(&w.require(ws::FEATURES, "features")?)?;
    if let Some(r) = m.rows.iter().find(|r| r.meta.delta != delta) {
        return Err(Error::Config(format!(
            "features were extracted with delta {} but the experiment uses {delta}; rerun `features --delta {delta}`",
            r.meta.delta
        )));
    }
    Ok(m)
}

fn train(w: &Workspace, a: TrainArgs) -> CliResult {
    let mut config = load_config(a.config.as_deref())?;
    config.seed = a.seed;
    if let Some(d) = a.delta {
        config.delta = d;
    }
    config.validate()?;
    let corpus = load_filtered(w)?;
    let topics = TopicModel::load(&w.require(ws::TOPICS, "topics")?)?;
    let matrix = load_features(w, config.delta)?;
    let index = FeatureIndex::new(&matrix);
    let split = study::sample_split(&corpus, &index, &config)?;
    study::probe_leakage(&corpus, &topics, &config.feature_options(), &split, config.train_year_max + config.delta)?;
    let models = study::train_models(&corpus, &index, &split, &config)?;
    let mut names = Vec::new();
    for m in &models {
        let name = ModelEntry::file_name(m.kind, m.delta_t);
        m.model.save(&w.path(Path::new(ws::MODELS).join(&name)))?;
        names.push(name);
    }
    for warning in &split.warnings {
        eprintln!("warning: {warning}");
    }
    print_json(&serde_json::json!({"train_size": split.train.len(), "models": names}))?;
    save_json(w, ws::EXPERIMENT, &ExperimentState { config, split, models: names })?;
    Ok(())
}

fn load_state(w: &Workspace) -> Result<ExperimentState> {
    load_json(&w.require(ws::EXPERIMENT, "train")?)
}

fn load_models(w: &Workspace, state: &ExperimentState) -> Result<Vec<ModelEntry>> {
    let mut out = Vec::new();
    for kind in &state.config.models {
        for &delta_t in &state.config.delta_t_list {
            let name = ModelEntry::file_name(*kind, delta_t);
            let path = w.path(Path::new(ws::MODELS).join(&name));
            if !path.exists() {
                return Err(Error::InvalidArgument(format!(
                    "model {name} is missing; workspace has: {}",
                    w.listing()
                )));
            }
            out.push(ModelEntry {
                kind: *kind,
                delta_t,
                model: TrainedModel::load(&path)?,
            });
        }
    }
    Ok(out)
}

fn evaluate(w: &Workspace) -> CliResult {
    let state = load_state(w)?;
    let corpus = load_filtered(w)?;
    let matrix = load_features(w, state.config.delta)?;
    let index = FeatureIndex::new(&matrix);
    let models = load_models(w, &state)?;
    let report = study::evaluate_models(&corpus, &index, &state.split, &models, &state.config)?;
    report.write_metrics_csv(w.create(ws::METRICS)?)?;
    for m in &models {
        let rel = format!("{}/{}_dt{}.csv", ws::SCATTER, m.kind.as_str(), m.delta_t);
        report.write_scatter_csv(m.kind, m.delta_t, w.create(&rel)?)?;
    }
    let summary: Vec<_> = report.rows.iter().collect();
    save_json(w, ws::EVALUATION, &summary)?;
    let mut text = Vec::new();
    report.write_metrics_csv(&mut text)?;
    emit(&text);
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(())
}

fn run_study(w: &Workspace, a: StudyArgs) -> CliResult {
    let needs_seed = matches!(a.kind, StudyKind::Ranking | StudyKind::Sensitivity);
    if needs_seed && a.seed.is_none() {
        return Err(Usage(format!("study --kind {:?} requires --seed", a.kind).to_lowercase()));
    }
    let ec = EcOptions::with_delta(a.delta);
    let mut buf = Vec::new();
    let rel = match a.kind {
        StudyKind::Correlation | StudyKind::Bucketed => {
            let corpus = load_filtered(w)?;
            let table = if a.kind == StudyKind::Correlation {
                study::correlation_study(&corpus, a.property, &ec, &study::CORRELATION_DELTA_TS)?
            } else {
                study::bucketed_correlation_study(&corpus, a.property, &ec, &study::BUCKETED_DELTA_TS)?
            };
            table.write_csv(&mut buf)?;
            let kind = if a.kind == StudyKind::Correlation { "correlation" } else { "bucketed" };
            format!("{}/{kind}_{}.csv", ws::STUDY, a.property.as_str())
        }
        StudyKind::Pairs => {
            let corpus = load_filtered(w)?;
            let dt = a.delta_t.unwrap_or(5);
            let pairs = study::mine_example_pairs(&corpus, a.property, dt, &ec)?;
            study::write_pairs_csv(&pairs, &mut buf)?;
            format!("{}/pairs_{}_dt{dt}.csv", ws::STUDY, a.property.as_str())
        }
        StudyKind::Crosscorr => {
            let matrix = FeatureMatrix::load(&w.require(ws::FEATURES, "features")?)?;
            let names: Vec<String> = FeatureSlot::ALL.iter().map(|s| s.name().to_string()).collect();
            let rows = matrix.select(&FeatureSlot::ALL);
            study::feature_cross_correlation(&rows, &names)?.write_csv(&mut buf)?;
            format!("{}/crosscorr.csv", ws::STUDY)
        }
        StudyKind::Ranking => {
            let mut config = load_config(a.config.as_deref())?;
            config.seed = a.seed.unwrap_or_default();
            let corpus = load_filtered(w)?;
            let matrix = load_features(w, config.delta)?;
            let index = FeatureIndex::new(&matrix);
            let dt = a.delta_t.unwrap_or(3);
            let ranking = study::feature_ranking(&corpus, &index, &config, dt)?;
            study::write_ranking_csv(&ranking, &mut buf)?;
            format!("{}/ranking_dt{dt}.csv", ws::STUDY)
        }
        StudyKind::Sensitivity => {
            let mut config = load_config(a.config.as_deref())?;
            config.seed = a.seed.unwrap_or_default();
            let corpus = load_filtered(w)?;
            let topics = TopicModel::load(&w.require(ws::TOPICS, "topics")?)?;
            let cells = study::delta_sensitivity(
                &corpus,
                &topics,
                &config,
                &study::SENSITIVITY_DELTAS,
                &study::SENSITIVITY_DELTA_TS,
            )?;
            study::write_sensitivity_csv(&cells, &mut buf)?;
            format!("{}/sensitivity.csv", ws::STUDY)
        }
    };
    let path = w.path(&rel);
    let mut f = w.create(&rel)?;
    f.write_all(&buf).and_then(|_| f.flush()).map_err(|e| Error::io(&path, e))?;
    emit(&buf);
    Ok(())
}

fn report(w: &Workspace, a: ReportArgs) -> CliResult {
    let state = match w.path(ws::EXPERIMENT).exists() {
        true => Some(load_state(w)?),
        false => None,
    };
    let Some(state) = state.filter(|s| !s.models.is_empty()) else {
        return Err(Domain(Error::InvalidArgument(format!(
            "no trained models in the workspace; available artifacts: {}",
            w.listing()
        ))));
    };
    let corpus = load_filtered(w)?;
    let matrix = load_features(w, state.config.delta)?;
    let models = load_models(w, &state)?;
    let slots = state.config.baseline.slots();
    let inputs: Vec<ReportModel> = models
        .iter()
        .map(|m| ReportModel {
            kind: m.kind,
            delta_t: m.delta_t,
            model: &m.model,
            slots: &slots,
        })
        .collect();
    let r = build_report(&corpus, &matrix, &inputs, &a.paper, &EcOptions::with_delta(state.config.delta))?;
    let dir = format!("{}/{}", ws::REPORTS, sanitize(&a.paper));
    let mut written = Vec::new();
    if matches!(a.format, ReportFormat::Json | ReportFormat::Both) {
        let json = r.to_json()?;
        let doc: serde_json::Value = serde_json::from_str(&json).map_err(|e| Error::Format(e.to_string()))?;
        validate_report(&doc)?;
        let rel = format!("{dir}/report.json");
        w.write_string(&rel, &json)?;
        written.push(rel);
    }
    if matches!(a.format, ReportFormat::Html | ReportFormat::Both) {
        let rel = format!("{dir}/report.html");
        w.write_string(&rel, &render_html(&r))?;
        written.push(rel);
    }
    print_json(&serde_json::json!({"paper": a.paper, "written": written}))?;
    Ok(())
}

/// Paper ids become directory names.
fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

fn synth(w: &Workspace, a: SynthArgs) -> CliResult {
    let mut p = SynthParams::with_papers(a.papers);
    p.stealing_strength = a.stealing;
    if let Some(n) = a.authors {
        p.n_authors = n;
    }
    if let Some(f) = a.influence_fraction {
        p.influence_fraction = f;
    }
    if let Some(b) = a.bucket2_boost {
        p.bucket2_boost = b;
    }
    let sc = study::generate_synthetic_corpus(&p, a.seed)?;
    sc.write_streams(&w.path(&a.streams))?;
    let corpus = sc.corpus()?;
    corpus.save(&w.path(ws::CORPUS))?;
    print_json(&serde_json::json!({
        "stats": corpus.stats(),
        "influential_authors": sc.influential.len(),
        "streams": a.streams,
    }))?;
    Ok(())
}
