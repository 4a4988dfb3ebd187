//! Early citers, influence classification and per-paper EC aggregates.
//!
//! A paper `P` published in year `T` has early citing papers `C_P`: stored
//! papers citing it with year in `[T, T+δ]`. Its early citers are the union
//! of their authors. Aggregates take one representative author per citing
//! paper (max publication count, max citation count, min co-authorship
//! distance to P's authors) and average over `C_P`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorIdx, Corpus, PaperIdx, Year};
use crate::error::{Error, Result};
use crate::graphs::{CoAuthorGraph, DEFAULT_HOP_CAP};

/// Default early window in years.
pub const DEFAULT_DELTA: i32 = 2;

/// Publication and citation counts of an author strictly before `as_of`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorSnapshot {
    pub author: AuthorIdx,
    pub as_of: Year,
    pub pub_count: u64,
    pub cit_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceThresholds {
    pub pub_threshold: u64,
    pub cit_threshold: u64,
    /// Fraction used to derive the thresholds, `None` for fixed values.
    pub percentile: Option<f64>,
    /// Set when ties made the quantile meaningless.
    pub degenerate: bool,
}

impl InfluenceThresholds {
    /// At least 21 publications or at least 250 citations.
    pub const fn fixed() -> Self {
        InfluenceThresholds {
            pub_threshold: 21,
            cit_threshold: 250,
            percentile: None,
            degenerate: false,
        }
    }
}

impl Default for InfluenceThresholds {
    fn default() -> Self {
        Self::fixed()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Influence {
    Influential,
    NonInfluential,
}

impl Influence {
    pub fn as_str(self) -> &'static str {
        match self {
            Influence::Influential => "influential",
            Influence::NonInfluential => "non_influential",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaBucket {
    Bucket1,
    Bucket2,
    Bucket3,
}

impl CaBucket {
    pub const ALL: [CaBucket; 3] = [CaBucket::Bucket1, CaBucket::Bucket2, CaBucket::Bucket3];

    pub fn as_str(self) -> &'static str {
        match self {
            CaBucket::Bucket1 => "BUCKET1",
            CaBucket::Bucket2 => "BUCKET2",
            CaBucket::Bucket3 => "BUCKET3",
        }
    }
}

/// How one value is picked from the authors of a citing paper.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selector {
    #[default]
    Max,
    Min,
    Mean,
    Median,
}

impl Selector {
    fn pick(self, values: &[f64]) -> f64 {
        debug_assert!(!values.is_empty());
        match self {
            Selector::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Selector::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Selector::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Selector::Median => {
                let mut values = values.to_vec();
                values.sort_by(f64::total_cmp);
                let m = values.len() / 2;
                if values.len() % 2 == 1 {
                    values[m]
                } else {
                    (values[m - 1] + values[m]) / 2.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcOptions {
    pub delta: i32,
    pub thresholds: InfluenceThresholds,
    pub hop_cap: u32,
    pub pc: Selector,
    pub cc: Selector,
    pub ca: Selector,
}

impl Default for EcOptions {
    fn default() -> Self {
        EcOptions {
            delta: DEFAULT_DELTA,
            thresholds: InfluenceThresholds::fixed(),
            hop_cap: DEFAULT_HOP_CAP,
            pc: Selector::Max,
            cc: Selector::Max,
            ca: Selector::Min,
        }
    }
}

impl EcOptions {
    pub fn with_delta(delta: i32) -> Self {
        EcOptions {
            delta,
            ..Default::default()
        }
    }
}

/// Representative authors chosen for one early citing paper.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CitingRepresentatives {
    pub citing: PaperIdx,
    pub year: Year,
    pub pc: f64,
    pub cc: f64,
    pub ca: f64,
    /// Author achieving the max publication count (smallest id on ties).
    pub pc_author: AuthorIdx,
    pub cc_author: AuthorIdx,
    pub ca_author: AuthorIdx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcAggregates {
    pub paper: PaperIdx,
    pub paper_id: String,
    pub year: Year,
    pub delta: i32,
    pub ecc: usize,
    pub pc: f64,
    pub cc: f64,
    pub ca: f64,
    pub bucket: CaBucket,
    pub influential_pc: bool,
    pub influential_cc: bool,
    pub citing: Vec<CitingRepresentatives>,
}

fn window(corpus: &Corpus, p: PaperIdx, delta: i32) -> Result<(Year, Year)> {
    if delta < 0 {
        return Err(Error::InvalidArgument(format!("delta must be >= 0, got {delta}")));
    }
    let t = corpus.year(p);
    Ok((t, t + delta))
}

/// Citing papers of `p` with year in `[T, T+delta]`, ordered by (year, index).
pub fn early_citing_papers(corpus: &Corpus, p: PaperIdx, delta: i32) -> Result<Vec<PaperIdx>> {
    let (t0, t1) = window(corpus, p, delta)?;
    Ok(corpus
        .citations_of(p)
        .iter()
        .filter(|c| c.year >= t0 && c.year <= t1)
        .map(|c| c.citing)
        .collect())
}

/// Union of the authors of the early citing papers, sorted by index.
pub fn early_citers(corpus: &Corpus, p: PaperIdx, delta: i32) -> Result<Vec<AuthorIdx>> {
    let mut authors: Vec<AuthorIdx> = early_citing_papers(corpus, p, delta)?
        .into_iter()
        .flat_map(|c| corpus.authors_of(c).iter().copied())
        .collect();
    authors.sort_unstable();
    authors.dedup();
    Ok(authors)
}

/// Early citation count: citations received in `[T, T+delta]`.
pub fn ecc(corpus: &Corpus, p: PaperIdx, delta: i32) -> Result<usize> {
    let (t0, t1) = window(corpus, p, delta)?;
    Ok(corpus.citations_in_window_at(p, t0, t1))
}

/// Cumulative citations in `[T, T+big_delta]`. Fails when the window runs
/// past the corpus horizon, since the count would be right-censored.
pub fn ltsi(corpus: &Corpus, p: PaperIdx, big_delta: i32) -> Result<usize> {
    let (t0, t1) = window(corpus, p, big_delta)?;
    let horizon = corpus.horizon().unwrap_or(t0);
    if t1 > horizon {
        return Err(Error::Horizon {
            requested: t1,
            horizon,
        });
    }
    Ok(corpus.citations_in_window_at(p, t0, t1))
}

/// Counts for an author over years strictly before `as_of`.
pub fn author_snapshot(corpus: &Corpus, a: AuthorIdx, as_of: Year) -> AuthorSnapshot {
    let papers = corpus.papers_of_author(a);
    let pub_count = papers.partition_point(|&p| corpus.year(p) < as_of) as u64;
    let cit_count = corpus.author_citation_years(a).partition_point(|&y| y < as_of) as u64;
    AuthorSnapshot {
        author: a,
        as_of,
        pub_count,
        cit_count,
    }
}

/// [`author_snapshot`] addressed by external id.
pub fn author_snapshot_by_id(corpus: &Corpus, id: &str, as_of: Year) -> Result<AuthorSnapshot> {
    Ok(author_snapshot(corpus, corpus.author_idx(id)?, as_of))
}

pub fn classify(s: &AuthorSnapshot, t: &InfluenceThresholds) -> Influence {
    if s.pub_count >= t.pub_threshold || s.cit_count >= t.cit_threshold {
        Influence::Influential
    } else {
        Influence::NonInfluential
    }
}

/// The `k`-th largest count with `k = ceil(percentile * n)`, plus a flag set
/// when every count ties so the quantile selects everyone.
pub fn top_quantile(counts: &[u64], percentile: f64) -> (u64, bool) {
    if counts.is_empty() {
        return (0, true);
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let k = ((percentile * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let threshold = sorted[k - 1];
    let degenerate = sorted.len() > 1 && threshold == *sorted.last().unwrap();
    (threshold, degenerate)
}

/// Thresholds placing roughly `percentile` of the authors above each count.
/// Counts are whole-corpus totals for authors with at least one paper.
pub fn influence_thresholds(corpus: &Corpus, percentile: f64) -> Result<InfluenceThresholds> {
    if !(percentile > 0.0 && percentile <= 1.0) {
        return Err(Error::InvalidArgument(format!("percentile {percentile} outside (0, 1]")));
    }
    let (mut pubs, mut cits) = (Vec::new(), Vec::new());
    for a in (0..corpus.n_authors_stored() as u32).map(AuthorIdx) {
        let papers = corpus.papers_of_author(a);
        if !papers.is_empty() {
            pubs.push(papers.len() as u64);
            cits.push(corpus.author_citation_years(a).len() as u64);
        }
    }
    if pubs.is_empty() {
        return Err(Error::InvalidArgument("corpus has no authors".into()));
    }
    let (pub_threshold, d1) = top_quantile(&pubs, percentile);
    let (cit_threshold, d2) = top_quantile(&cits, percentile);
    Ok(InfluenceThresholds {
        pub_threshold,
        cit_threshold,
        percentile: Some(percentile),
        degenerate: d1 || d2,
    })
}

pub fn ca_bucket(ca: f64) -> Result<CaBucket> {
    if !(ca >= 0.0) {
        return Err(Error::InvalidArgument(format!("co-authorship distance {ca} is negative")));
    }
    Ok(if ca < 1.0 {
        CaBucket::Bucket1
    } else if ca < 2.0 {
        CaBucket::Bucket2
    } else {
        CaBucket::Bucket3
    })
}

/// Picks the author whose value matches `target`, smallest external id first.
fn representative(corpus: &Corpus, authors: &[AuthorIdx], values: &[f64], target: f64) -> AuthorIdx {
    authors
        .iter()
        .zip(values)
        .filter(|(_, &v)| v == target)
        .map(|(&a, _)| a)
        .min_by(|&a, &b| corpus.author_id(a).cmp(corpus.author_id(b)))
        .unwrap_or_else(|| {
            // Mean/median need not match any author; fall back to nearest.
            *authors
                .iter()
                .zip(values)
                .min_by(|(a, x), (b, y)| {
                    (*x - target)
                        .abs()
                        .total_cmp(&(*y - target).abs())
                        .then_with(|| corpus.author_id(**a).cmp(corpus.author_id(**b)))
                })
                .unwrap()
                .0
        })
}

/// EC aggregates of `p`. The co-authorship graph must not extend past
/// `T + delta`; the conventional choice is exactly `T + delta`.
pub fn ec_aggregates(corpus: &Corpus, coauthors: &CoAuthorGraph, p: PaperIdx, opts: &EcOptions) -> Result<EcAggregates> {
    let (t0, t1) = window(corpus, p, opts.delta)?;
    if coauthors.as_of() > t1 {
        return Err(Error::InvalidArgument(format!(
            "co-authorship graph sliced at {} reads past the early window end {t1}",
            coauthors.as_of()
        )));
    }
    let citing = early_citing_papers(corpus, p, opts.delta)?;
    if citing.is_empty() {
        return Err(Error::EmptyWindow {
            paper: corpus.paper_id(p).to_string(),
            start: t0,
            end: t1,
        });
    }
    let dist = coauthors.distances_from(corpus.authors_of(p), opts.hop_cap);
    let ca_of = |a: AuthorIdx| -> f64 {
        coauthors
            .node_of(a)
            .and_then(|n| dist[n])
            .map_or(opts.hop_cap as f64, |h| h as f64)
    };

    let mut reps = Vec::with_capacity(citing.len());
    for &c in &citing {
        let yc = corpus.year(c);
        let authors = corpus.authors_of(c);
        let snaps: Vec<AuthorSnapshot> = authors.iter().map(|&a| author_snapshot(corpus, a, yc)).collect();
        let pcs: Vec<f64> = snaps.iter().map(|s| s.pub_count as f64).collect();
        let ccs: Vec<f64> = snaps.iter().map(|s| s.cit_count as f64).collect();
        let cas: Vec<f64> = authors.iter().map(|&a| ca_of(a)).collect();
        let (pc, cc, ca) = (opts.pc.pick(&pcs), opts.cc.pick(&ccs), opts.ca.pick(&cas));
        reps.push(CitingRepresentatives {
            citing: c,
            year: yc,
            pc,
            cc,
            ca,
            pc_author: representative(corpus, authors, &pcs, pc),
            cc_author: representative(corpus, authors, &ccs, cc),
            ca_author: representative(corpus, authors, &cas, ca),
        });
    }
    let n = reps.len() as f64;
    let pc = reps.iter().map(|r| r.pc).sum::<f64>() / n;
    let cc = reps.iter().map(|r| r.cc).sum::<f64>() / n;
    let ca = reps.iter().map(|r| r.ca).sum::<f64>() / n;
    Ok(EcAggregates {
        paper: p,
        paper_id: corpus.paper_id(p).to_string(),
        year: t0,
        delta: opts.delta,
        ecc: corpus.citations_in_window_at(p, t0, t1),
        pc,
        cc,
        ca,
        bucket: ca_bucket(ca)?,
        influential_pc: pc >= opts.thresholds.pub_threshold as f64,
        influential_cc: cc >= opts.thresholds.cit_threshold as f64,
        citing: reps,
    })
}

/// Every early citer with its class at the time of its first early citation.
pub fn classify_early_citers(
    corpus: &Corpus,
    p: PaperIdx,
    delta: i32,
    thresholds: &InfluenceThresholds,
) -> Result<Vec<(AuthorIdx, Influence)>> {
    let mut first: BTreeMap<AuthorIdx, Year> = BTreeMap::new();
    for c in early_citing_papers(corpus, p, delta)? {
        for &a in corpus.authors_of(c) {
            let y = corpus.year(c);
            first.entry(a).and_modify(|e| *e = (*e).min(y)).or_insert(y);
        }
    }
    let mut out: Vec<(AuthorIdx, Influence)> = first
        .into_iter()
        .map(|(a, y)| (a, classify(&author_snapshot(corpus, a, y), thresholds)))
        .collect();
    out.sort_by(|x, y| corpus.author_id(x.0).cmp(corpus.author_id(y.0)));
    Ok(out)
}

/// Caches co-authorship graphs by slice year.
#[derive(Default)]
pub struct CoAuthorCache {
    graphs: BTreeMap<Year, CoAuthorGraph>,
}

impl CoAuthorCache {
    pub fn get(&mut self, corpus: &Corpus, as_of: Year) -> &CoAuthorGraph {
        self.graphs
            .entry(as_of)
            .or_insert_with(|| crate::graphs::build_coauthorship_graph(corpus, as_of))
    }
}

/// Aggregates for every retained paper with a non-empty early window.
/// Papers without early citers are skipped.
pub fn ec_aggregates_all(corpus: &Corpus, opts: &EcOptions) -> Result<Vec<EcAggregates>> {
    let mut cache = CoAuthorCache::default();
    let mut out = Vec::new();
    for p in corpus.retained_papers() {
        let g = cache.get(corpus, corpus.year(p) + opts.delta);
        match ec_aggregates(corpus, g, p, opts) {
            Ok(agg) => out.push(agg),
            Err(Error::EmptyWindow { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// CSV with columns paper_id, year, delta, ecc, PC, CC, CA, bucket,
/// influential_pc, influential_cc.
pub fn write_aggregates_csv(rows: &[EcAggregates], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let to_err = |e: csv::Error| Error::Format(e.to_string());
    out.write_record([
        "paper_id",
        "year",
        "delta",
        "ecc",
        "PC",
        "CC",
        "CA",
        "bucket",
        "influential_pc",
        "influential_cc",
    ])
    .map_err(to_err)?;
    for r in rows {
        out.write_record([
            r.paper_id.clone(),
            r.year.to_string(),
            r.delta.to_string(),
            r.ecc.to_string(),
            r.pc.to_string(),
            r.cc.to_string(),
            r.ca.to_string(),
            r.bucket.as_str().to_string(),
            r.influential_pc.to_string(),
            r.influential_cc.to_string(),
        ])
        .map_err(to_err)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}
