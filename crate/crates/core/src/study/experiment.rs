use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, PaperIdx, Year};
use crate::earlyciters::{self, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureMatrix, FeatureOptions, FeatureSlot, FeatureVector};
use crate::models::{self, pearson, Hyperparams, Metrics, ModelKind, TrainedModel};
use crate::topics::{TopicModel, TopicOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Baseline {
    /// Everything known at publication.
    I,
    /// I plus the early citation count.
    II,
    /// II plus the citation-context slots.
    III,
    /// Every slot except the citation-context ones.
    #[serde(rename = "OUR")]
    Our,
    #[serde(rename = "FULL")]
    Full,
}

impl Baseline {
    pub const ALL: [Baseline; 5] = [Baseline::I, Baseline::II, Baseline::III, Baseline::Our, Baseline::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::I => "I",
            Baseline::II => "II",
            Baseline::III => "III",
            Baseline::Our => "OUR",
            Baseline::Full => "FULL",
        }
    }

    /// Slots in canonical order.
    pub fn slots(self) -> Vec<FeatureSlot> {
        let context = |s: FeatureSlot| matches!(s, FeatureSlot::Ccac | FeatureSlot::Ccaw);
        FeatureSlot::ALL
            .into_iter()
            .filter(|&s| match self {
                Baseline::I => s.at_publication(),
                Baseline::II => s.at_publication() || s == FeatureSlot::Ecc,
                Baseline::III => s.at_publication() || s == FeatureSlot::Ecc || context(s),
                Baseline::Our => !context(s),
                Baseline::Full => true,
            })
            .collect()
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Baseline> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown baseline {s:?} (expected I, II, III, OUR or FULL)")))
    }
}

pub fn baseline_features(name: &str) -> Result<Vec<FeatureSlot>> {
    Ok(name.parse::<Baseline>()?.slots())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Training papers are published in or before this year.
    pub train_year_max: Year,
    pub train_size: usize,
    /// Inclusive range of test publication years.
    pub test_years: (Year, Year),
    pub test_size: usize,
    pub n_test_samples: usize,
    pub delta: i32,
    pub delta_t_list: Vec<i32>,
    pub models: Vec<ModelKind>,
    pub baseline: Baseline,
    pub seed: u64,
    pub topic_k: usize,
    pub topic_iterations: usize,
    pub hyperparams: Hyperparams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train_year_max: 1995,
            train_size: 10_000,
            test_years: (1998, 2010),
            test_size: 10_000,
            n_test_samples: 3,
            delta: DEFAULT_DELTA,
            delta_t_list: vec![3, 5, 7, 9, 11],
            models: ModelKind::ALL.to_vec(),
            baseline: Baseline::Our,
            seed: 0,
            topic_k: 50,
            topic_iterations: 500,
            hyperparams: Hyperparams::default(),
        }
    }
}

impl ExperimentConfig {
    /// Rejects configurations whose test papers could see training-time
    /// information, or that cannot run at all.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let earliest = self.train_year_max + self.delta + 1;
        if self.test_years.0 < earliest {
            return bad(format!(
                "test years start at {} but must start at or after {earliest} (train_year_max + delta + 1)",
                self.test_years.0
            ));
        }
        if self.test_years.1 < self.test_years.0 {
            return bad("test year range is empty".into());
        }
        if self.delta < 0 {
            return bad(format!("delta must be >= 0, got {}", self.delta));
        }
        if self.delta_t_list.is_empty() || self.delta_t_list.iter().any(|&d| d < 0) {
            return bad("delta_t_list must be non-empty and nonnegative".into());
        }
        if self.models.is_empty() {
            return bad("no models selected".into());
        }
        if self.train_size < 2 || self.test_size < 2 || self.n_test_samples == 0 {
            return bad("train_size and test_size must be >= 2 and n_test_samples >= 1".into());
        }
        if self.topic_k == 0 {
            return bad("topic_k must be >= 1".into());
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml(&text)
    }

    /// Topic model restricted to documents visible at training time.
    pub fn topic_options(&self) -> TopicOptions {
        TopicOptions {
            k: self.topic_k,
            iterations: self.topic_iterations,
            seed: self.seed,
            max_year: Some(self.train_year_max + self.delta),
            ..Default::default()
        }
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions::with_delta(self.delta)
    }

    fn max_delta_t(&self) -> i32 {
        self.delta_t_list.iter().copied().max().unwrap_or(0)
    }
}

/// Stream seed for one named purpose, so samples do not depend on each
/// other's draw counts.
fn stream(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut z = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn sample(pool: &[PaperIdx], size: usize, rng: &mut ChaCha8Rng) -> Vec<PaperIdx> {
    let mut out: Vec<PaperIdx> = pool.choose_multiple(rng, size.min(pool.len())).copied().collect();
    out.sort_unstable();
    out
}

/// Training papers and, per `Δt`, the sampled test sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSplit {
    pub train: Vec<PaperIdx>,
    pub tests: BTreeMap<i32, Vec<Vec<PaperIdx>>>,
    pub warnings: Vec<String>,
}

/// Samples the split. Only papers with a feature row take part; a test
/// paper enters a `Δt` only when the horizon covers `T + Δt`.
pub fn sample_split(corpus: &Corpus, features: &FeatureIndex, config: &ExperimentConfig) -> Result<ExperimentSplit> {
    config.validate()?;
    let horizon = corpus.horizon().unwrap_or(Year::MIN);
    let mut warnings = Vec::new();
    let eligible: Vec<PaperIdx> = corpus.retained_papers().filter(|&p| features.get(corpus, p).is_some()).collect();

    let max_dt = config.max_delta_t();
    let pool: Vec<PaperIdx> = eligible
        .iter()
        .copied()
        .filter(|&p| corpus.year(p) <= config.train_year_max && corpus.year(p) + max_dt <= horizon)
        .collect();
    if pool.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "only {} eligible training papers published by {}",
            pool.len(),
            config.train_year_max
        )));
    }
    if pool.len() < config.train_size {
        warnings.push(format!(
            "train_size shrunk from {} to {} eligible papers",
            config.train_size,
            pool.len()
        ));
    }
    let train = sample(&pool, config.train_size, &mut stream(config.seed, 0));

    let mut tests = BTreeMap::new();
    for &dt in &config.delta_t_list {
        let pool: Vec<PaperIdx> = eligible
            .iter()
            .copied()
            .filter(|&p| {
                let t = corpus.year(p);
                t >= config.test_years.0 && t <= config.test_years.1 && t + dt <= horizon
            })
            .collect();
        if pool.len() < 2 {
            return Err(Error::InvalidArgument(format!("fewer than 2 eligible test papers for delta_t = {dt}")));
        }
        if pool.len() < config.test_size {
            warnings.push(format!(
                "delta_t {dt}: test_size shrunk from {} to {} eligible papers",
                config.test_size,
                pool.len()
            ));
        }
        let sets = (0..config.n_test_samples)
            .map(|s| sample(&pool, config.test_size, &mut stream(config.seed, 1 + ((dt as u64) << 16) + s as u64)))
            .collect();
        tests.insert(dt, sets);
    }
    Ok(ExperimentSplit { train, tests, warnings })
}

/// Feature rows looked up by paper id.
pub struct FeatureIndex<'a> {
    by_id: HashMap<&'a str, &'a FeatureVector>,
}

impl<'a> FeatureIndex<'a> {
    pub fn new(matrix: &'a FeatureMatrix) -> Self {
        FeatureIndex {
            by_id: matrix.rows.iter().map(|r| (r.meta.paper_id.as_str(), r)).collect(),
        }
    }

    pub fn get(&self, corpus: &Corpus, p: PaperIdx) -> Option<&'a FeatureVector> {
        self.by_id.get(corpus.paper_id(p)).copied()
    }

    fn rows(&self, corpus: &Corpus, papers: &[PaperIdx], slots: &[FeatureSlot]) -> Result<Vec<Vec<f64>>> {
        papers
            .iter()
            .map(|&p| {
                self.get(corpus, p)
                    .map(|v| v.select(slots))
                    .ok_or_else(|| Error::not_found("feature row", corpus.paper_id(p)))
            })
            .collect()
    }
}

/// Regression target for a paper at a given `Δt`.
pub type TargetFn<'a> = dyn Fn(PaperIdx, i32) -> Result<f64> + 'a;

fn targets(target: &TargetFn, papers: &[PaperIdx], delta_t: i32) -> Result<Vec<f64>> {
    papers.iter().map(|&p| target(p, delta_t)).collect()
}

fn ltsi_target(corpus: &Corpus) -> impl Fn(PaperIdx, i32) -> Result<f64> + '_ {
    move |p, dt| earlyciters::ltsi(corpus, p, dt).map(|v| v as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub kind: ModelKind,
    pub delta_t: i32,
    pub model: TrainedModel,
}

impl ModelEntry {
    pub fn file_name(kind: ModelKind, delta_t: i32) -> String {
        format!("{}_dt{delta_t}.bin", kind.as_str())
    }
}

/// One model per (kind, `Δt`), each fitted to LTSI at that `Δt`.
pub fn train_models(
    corpus: &Corpus,
    features: &FeatureIndex,
    split: &ExperimentSplit,
    config: &ExperimentConfig,
) -> Result<Vec<ModelEntry>> {
    train_models_with(corpus, features, split, config, &ltsi_target(corpus))
}

/// [`train_models`] against an arbitrary target.
pub fn train_models_with(
    corpus: &Corpus,
    features: &FeatureIndex,
    split: &ExperimentSplit,
    config: &ExperimentConfig,
    target: &TargetFn,
) -> Result<Vec<ModelEntry>> {
    let slots = config.baseline.slots();
    let x = features.rows(corpus, &split.train, &slots)?;
    let mut out = Vec::new();
    for &dt in &config.delta_t_list {
        let y = targets(target, &split.train, dt)?;
        for &kind in &config.models {
            let model = models::train(kind, &x, &y, &config.hyperparams, config.seed)?;
            out.push(ModelEntry { kind, delta_t: dt, model });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single sample.
    pub std: Option<f64>,
}

impl MetricSummary {
    fn of(values: &[f64]) -> MetricSummary {
        if values.is_empty() {
            return MetricSummary { mean: None, std: None };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MetricSummary {
            mean: Some(mean),
            std: Some(std),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub model: ModelKind,
    pub delta_t: i32,
    pub n_samples: usize,
    pub test_size: usize,
    pub rho: MetricSummary,
    pub r2_explained: MetricSummary,
    pub r2_standard: MetricSummary,
    /// Samples whose metrics were undefined (constant truth or predictions).
    pub undefined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub model: ModelKind,
    pub delta_t: i32,
    pub sample: usize,
    pub paper_id: String,
    pub predicted: f64,
    pub actual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub baseline: Baseline,
    pub train_size: usize,
    pub rows: Vec<EvalRow>,
    pub scatter: Vec<ScatterPoint>,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn row(&self, model: ModelKind, delta_t: i32) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.model == model && r.delta_t == delta_t)
    }

    pub fn write_metrics_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        out.write_record([
            "baseline",
            "model",
            "delta_t",
            "n_samples",
            "test_size",
            "rho_mean",
            "rho_std",
            "r2_explained_mean",
            "r2_explained_std",
            "r2_standard_mean",
            "r2_standard_std",
            "undefined",
        ])
        .map_err(fail)?;
        let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
        for r in &self.rows {
            out.write_record([
                self.baseline.as_str().to_string(),
                r.model.as_str().to_string(),
                r.delta_t.to_string(),
                r.n_samples.to_string(),
                r.test_size.to_string(),
                f(r.rho.mean),
                f(r.rho.std),
                f(r.r2_explained.mean),
                f(r.r2_explained.std),
                f(r.r2_standard.mean),
                f(r.r2_standard.std),
                r.undefined.to_string(),
            ])
            .map_err(fail)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }

    /// Predicted-vs-actual pairs for one model and `Δt`. Negative
    /// predictions are clamped to 0 in the `predicted` column.
    pub fn write_scatter_csv(&self, model: ModelKind, delta_t: i32, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(["sample", "paper_id", "predicted", "predicted_raw", "actual"])
            .map_err(fail)?;
        for p in self.scatter.iter().filter(|p| p.model == model && p.delta_t == delta_t) {
            out.write_record([
                p.sample.to_string(),
                p.paper_id.clone(),
                format!("{:.6}", p.predicted.max(0.0)),
                format!("{:.6}", p.predicted),
                p.actual.to_string(),
            ])
            .map_err(fail)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }
}

/// Metrics are computed on raw predictions.
pub fn evaluate_models(
    corpus: &Corpus,
    features: &FeatureIndex,
    split: &ExperimentSplit,
    models: &[ModelEntry],
    config: &ExperimentConfig,
) -> Result<EvaluationReport> {
    evaluate_models_with(corpus, features, split, models, config, &ltsi_target(corpus))
}

pub fn evaluate_models_with(
    corpus: &Corpus,
    features: &FeatureIndex,
    split: &ExperimentSplit,
    models: &[ModelEntry],
    config: &ExperimentConfig,
    target: &TargetFn,
) -> Result<EvaluationReport> {
    let slots = config.baseline.slots();
    let mut rows = Vec::new();
    let mut scatter = Vec::new();
    let mut sorted: Vec<&ModelEntry> = models.iter().collect();
    sorted.sort_by_key(|m| (m.kind, m.delta_t));
    for entry in sorted {
        let Some(sets) = split.tests.get(&entry.delta_t) else {
            return Err(Error::InvalidArgument(format!(
                "no test sets for delta_t = {} (model {})",
                entry.delta_t, entry.kind
            )));
        };
        if entry.model.dim() != slots.len() {
            return Err(Error::InvalidArgument(format!(
                "{} model for delta_t {} expects {} features but baseline {} has {}",
                entry.kind,
                entry.delta_t,
                entry.model.dim(),
                config.baseline.as_str(),
                slots.len()
            )));
        }
        let (mut rho, mut r2p, mut r2s, mut undefined) = (vec![], vec![], vec![], 0);
        for (s, papers) in sets.iter().enumerate() {
            let x = features.rows(corpus, papers, &slots)?;
            let y = targets(target, papers, entry.delta_t)?;
            let pred = entry.model.predict(&x, false)?;
            match Metrics::compute(&pred, &y) {
                Ok(m) => {
                    rho.push(m.rho);
                    r2p.push(m.r2_explained);
                    r2s.push(m.r2_standard);
                }
                Err(Error::UndefinedMetric(_)) => undefined += 1,
                Err(e) => return Err(e),
            }
            for ((&p, &predicted), &actual) in papers.iter().zip(&pred).zip(&y) {
                scatter.push(ScatterPoint {
                    model: entry.kind,
                    delta_t: entry.delta_t,
                    sample: s,
                    paper_id: corpus.paper_id(p).to_string(),
                    predicted,
                    actual,
                });
            }
        }
        rows.push(EvalRow {
            model: entry.kind,
            delta_t: entry.delta_t,
            n_samples: sets.len(),
            test_size: sets.first().map_or(0, Vec::len),
            rho: MetricSummary::of(&rho),
            r2_explained: MetricSummary::of(&r2p),
            r2_standard: MetricSummary::of(&r2s),
            undefined,
        });
    }
    Ok(EvaluationReport {
        baseline: config.baseline,
        train_size: split.train.len(),
        rows,
        scatter,
        warnings: split.warnings.clone(),
    })
}

/// Recomputes the features of `papers` on the corpus truncated at `cutoff`
/// and fails unless every vector is bitwise identical.
pub fn leakage_check(
    corpus: &Corpus,
    topics: &TopicModel,
    opts: &FeatureOptions,
    papers: &[PaperIdx],
    cutoff: Year,
) -> Result<()> {
    let truncated = corpus.truncate(cutoff);
    let mut full = FeatureExtractor::new(corpus, topics, opts.clone());
    let mut cut = FeatureExtractor::new(&truncated, topics, opts.clone());
    for &p in papers {
        let id = corpus.paper_id(p);
        let a = full.extract(p)?;
        let b = cut.extract_id(id)?;
        if !a.bits_eq(&b) {
            return Err(Error::InvalidArgument(format!(
                "leakage: features of {id} change when events after {cutoff} are removed"
            )));
        }
    }
    Ok(())
}

/// Papers of interest for an experiment: retained, published by the end
/// of the test range.
fn candidate_papers(corpus: &Corpus, config: &ExperimentConfig) -> Vec<PaperIdx> {
    corpus
        .retained_papers()
        .filter(|&p| {
            let t = corpus.year(p);
            t <= config.train_year_max || (t >= config.test_years.0 && t <= config.test_years.1)
        })
        .collect()
}

fn extract_candidates(corpus: &Corpus, topics: &TopicModel, opts: FeatureOptions, config: &ExperimentConfig) -> Result<FeatureMatrix> {
    FeatureExtractor::new(corpus, topics, opts).extract_many(candidate_papers(corpus, config))
}

/// Number of training papers re-extracted on the truncated corpus.
pub const LEAKAGE_PROBES: usize = 25;

/// [`leakage_check`] on an even spread of training papers.
pub fn probe_leakage(corpus: &Corpus, topics: &TopicModel, opts: &FeatureOptions, split: &ExperimentSplit, cutoff: Year) -> Result<()> {
    let step = (split.train.len() / LEAKAGE_PROBES).max(1);
    let probes: Vec<PaperIdx> = split.train.iter().step_by(step).copied().collect();
    leakage_check(corpus, topics, opts, &probes, cutoff)
}

/// Fits the topic model on training-time documents, extracts features,
/// verifies the leakage guard on a spread of training papers, then trains
/// and evaluates every configured model.
pub fn run_experiment(corpus: &Corpus, config: &ExperimentConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let topics = TopicModel::fit(corpus, &config.topic_options())?;
    run_experiment_with_topics(corpus, &topics, config)
}

pub fn run_experiment_with_topics(corpus: &Corpus, topics: &TopicModel, config: &ExperimentConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let opts = config.feature_options();
    let matrix = extract_candidates(corpus, topics, opts.clone(), config)?;
    let index = FeatureIndex::new(&matrix);
    let split = sample_split(corpus, &index, config)?;
    probe_leakage(corpus, topics, &opts, &split, config.train_year_max + config.delta)?;
    let models = train_models(corpus, &index, &split, config)?;
    evaluate_models(corpus, &index, &split, &models, config)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCell {
    pub delta: i32,
    pub delta_t: i32,
    pub model: ModelKind,
    pub rho: Option<f64>,
    pub r2_explained: Option<f64>,
    pub r2_standard: Option<f64>,
}

pub const SENSITIVITY_DELTAS: [i32; 3] = [1, 2, 3];
pub const SENSITIVITY_DELTA_TS: [i32; 3] = [5, 7, 9];

/// Reruns the experiment for each early window `δ`, keeping the ECC slot on
/// the default window. The test range starts after the later of the two
/// windows closes for the last training year.
pub fn delta_sensitivity(
    corpus: &Corpus,
    topics: &TopicModel,
    config: &ExperimentConfig,
    deltas: &[i32],
    delta_ts: &[i32],
) -> Result<Vec<SensitivityCell>> {
    let mut cells = Vec::new();
    for &delta in deltas {
        // The ECC slot still reads up to T + 2 when δ < 2.
        let reach = delta.max(DEFAULT_DELTA);
        let cfg = ExperimentConfig {
            delta: reach,
            delta_t_list: delta_ts.to_vec(),
            test_years: (
                config.test_years.0.max(config.train_year_max + reach + 1),
                config.test_years.1,
            ),
            ..config.clone()
        };
        cfg.validate()?;
        let opts = FeatureOptions {
            ecc_delta: Some(DEFAULT_DELTA),
            ..FeatureOptions::with_delta(delta)
        };
        let matrix = extract_candidates(corpus, topics, opts.clone(), &cfg)?;
        let index = FeatureIndex::new(&matrix);
        let split = sample_split(corpus, &index, &cfg)?;
        probe_leakage(corpus, topics, &opts, &split, cfg.train_year_max + reach)?;
        let models = train_models(corpus, &index, &split, &cfg)?;
        let report = evaluate_models(corpus, &index, &split, &models, &cfg)?;
        for r in report.rows {
            cells.push(SensitivityCell {
                delta,
                delta_t: r.delta_t,
                model: r.model,
                rho: r.rho.mean,
                r2_explained: r.r2_explained.mean,
                r2_standard: r.r2_standard.mean,
            });
        }
    }
    cells.sort_by_key(|c| (c.model, c.delta_t, c.delta));
    Ok(cells)
}

pub fn write_sensitivity_csv(cells: &[SensitivityCell], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for c in cells {
        out.serialize(c).map_err(|e| Error::Format(e.to_string()))?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub slot: FeatureSlot,
    /// `None` when the correlation is undefined.
    pub rho: Option<f64>,
}

/// One single-feature SVR per slot, ranked by the Pearson correlation of its
/// test predictions with the truth. Undefined correlations go last; ties
/// keep slot order.
pub fn rank_features(
    train: &[&FeatureVector],
    train_y: &[f64],
    test: &[&FeatureVector],
    test_y: &[f64],
    hyperparams: &Hyperparams,
) -> Result<Vec<RankedFeature>> {
    let mut out = Vec::with_capacity(FeatureSlot::ALL.len());
    for slot in FeatureSlot::ALL {
        let x: Vec<Vec<f64>> = train.iter().map(|v| vec![v.get(slot)]).collect();
        let hp = Hyperparams {
            svr: hyperparams.svr,
            ..Default::default()
        };
        let model = models::train(ModelKind::Svr, &x, train_y, &hp, 0)?;
        let tx: Vec<Vec<f64>> = test.iter().map(|v| vec![v.get(slot)]).collect();
        let pred = model.predict(&tx, false)?;
        out.push(RankedFeature {
            slot,
            rho: pearson(&pred, test_y).ok(),
        });
    }
    out.sort_by(|a, b| match (a.rho, b.rho) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(out)
}

/// [`rank_features`] on the experiment's training sample and first test
/// sample at `delta_t`.
pub fn feature_ranking(
    corpus: &Corpus,
    features: &FeatureIndex,
    config: &ExperimentConfig,
    delta_t: i32,
) -> Result<Vec<RankedFeature>> {
    let cfg = ExperimentConfig {
        delta_t_list: vec![delta_t],
        ..config.clone()
    };
    let split = sample_split(corpus, features, &cfg)?;
    let test = &split.tests[&delta_t][0];
    let target = ltsi_target(corpus);
    let lookup = |ps: &[PaperIdx]| -> Result<Vec<&FeatureVector>> {
        ps.iter()
            .map(|&p| features.get(corpus, p).ok_or_else(|| Error::not_found("feature row", corpus.paper_id(p))))
            .collect()
    };
    rank_features(
        &lookup(&split.train)?,
        &targets(&target, &split.train, delta_t)?,
        &lookup(test)?,
        &targets(&target, test, delta_t)?,
        &config.hyperparams,
    )
}

pub fn write_ranking_csv(ranking: &[RankedFeature], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let fail = |e: csv::Error| Error::Format(e.to_string());
    out.write_record(["rank", "feature", "rho"]).map_err(fail)?;
    for (i, r) in ranking.iter().enumerate() {
        out.write_record([
            (i + 1).to_string(),
            r.slot.name().to_string(),
            r.rho.map_or(String::new(), |v| format!("{v:.6}")),
        ])
        .map_err(fail)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}
