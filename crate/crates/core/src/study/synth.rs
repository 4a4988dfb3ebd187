//! Synthetic corpora with planted early-citer effects.
//!
//! Every paper draws its yearly citations from a Poisson rate with fitness,
//! ageing and mild preferential attachment. Once a paper's
//! early window `[T, T+2]` closes, its later attractiveness is scaled by a
//! multiplier computed from the same early-citer aggregates the analysis
//! measures:
//!
//! * aggregate PC below the influence threshold: `1 + s·PC/21`, a visibility
//!   gain from well-published early citers;
//! * at or above it: `exp(-s·b·(0.3 + (PC-21)/21))`, so heavier influential
//!   early citers take more of the paper's later citations. The factor `b`
//!   is `0.5` for CA below 1 (mostly self-citations), `1 + bucket2_boost` for
//!   CA in `[1, 2)`, and `1` beyond.
//!
//! `s = 0` switches every effect off.

use std::collections::{HashSet, VecDeque};
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationContextRecord, Corpus, IngestOptions, NamedRecord, PaperRecord, Year};
use crate::earlyciters::DEFAULT_DELTA;
use crate::error::{Error, Result};
use crate::graphs::DEFAULT_HOP_CAP;

const PUB_THRESHOLD: f64 = 21.0;
const WORDS_PER_TOPIC: usize = 40;
const COMMON_WORDS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_papers: usize,
    pub n_authors: usize,
    pub years: (Year, Year),
    pub stealing_strength: f64,
    /// Share of authors planted as prolific.
    pub influence_fraction: f64,
    pub bucket2_boost: f64,
    /// Expected citations per paper per year before ageing and effects.
    pub citation_rate: f64,
    /// Chance that a new paper cites a recent paper of its team or their
    /// co-authors.
    pub social_rate: f64,
    /// Log-scale spread of per-paper fitness.
    pub fitness_sigma: f64,
    /// Rate gain per citation already received.
    pub attachment: f64,
    pub n_venues: usize,
    pub n_topics: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams::with_papers(5000)
    }
}

impl SynthParams {
    /// Defaults scaled to `n_papers`, about one author per three papers.
    pub fn with_papers(n_papers: usize) -> Self {
        SynthParams {
            n_papers,
            n_authors: (n_papers * 3 / 10).max(30),
            years: (1975, 2012),
            stealing_strength: 0.5,
            influence_fraction: 0.03,
            bucket2_boost: 2.0,
            citation_rate: 0.8,
            social_rate: 0.5,
            fitness_sigma: 0.5,
            attachment: 0.05,
            n_venues: 24,
            n_topics: 8,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n_papers == 0 || self.n_authors < 2 {
            return bad("need at least one paper and two authors");
        }
        if self.years.1 < self.years.0 + DEFAULT_DELTA {
            return bad("year range too short");
        }
        if !(0.0..=1.0).contains(&self.stealing_strength) {
            return bad("stealing_strength must lie in [0, 1]");
        }
        if !(self.influence_fraction > 0.0 && self.influence_fraction < 1.0) {
            return bad("influence_fraction must lie in (0, 1)");
        }
        if !(self.bucket2_boost >= 0.0 && self.citation_rate > 0.0 && (0.0..=1.0).contains(&self.social_rate)) {
            return bad("need bucket2_boost >= 0, citation_rate > 0 and social_rate in [0, 1]");
        }
        if self.n_venues == 0 || self.n_topics == 0 {
            return bad("need at least one venue and one topic");
        }
        Ok(())
    }
}

/// A generated corpus in record form, ready for [`Corpus::from_records`] or
/// for writing as line-delimited streams.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthCorpus {
    pub papers: Vec<PaperRecord>,
    pub authors: Vec<NamedRecord>,
    pub venues: Vec<NamedRecord>,
    pub contexts: Vec<CitationContextRecord>,
    /// Ids of the planted prolific authors.
    pub influential: Vec<String>,
}

impl SynthCorpus {
    pub fn corpus(&self) -> Result<Corpus> {
        let d = IngestOptions::default();
        let opts = IngestOptions {
            year_min: self.papers.iter().map(|p| p.year).min().map_or(d.year_min, |y| y.min(d.year_min)),
            year_max: self.papers.iter().map(|p| p.year).max().map_or(d.year_max, |y| y.max(d.year_max)),
        };
        Corpus::from_records(
            self.papers.clone(),
            self.authors.clone(),
            self.venues.clone(),
            self.contexts.clone(),
            &opts,
        )
    }

    /// Writes `papers.jsonl`, `authors.jsonl`, `venues.jsonl` and
    /// `contexts.jsonl` into `dir`, one record per line.
    pub fn write_streams(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_jsonl(&dir.join("papers.jsonl"), &self.papers)?;
        write_jsonl(&dir.join("authors.jsonl"), &self.authors)?;
        write_jsonl(&dir.join("venues.jsonl"), &self.venues)?;
        write_jsonl(&dir.join("contexts.jsonl"), &self.contexts)
    }
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for r in rows {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

struct Paper {
    year: Year,
    topic: usize,
    authors: Vec<u32>,
    fitness: f64,
    multiplier: f64,
    cites: u32,
    early: Vec<u32>,
}

struct State {
    pub_years: Vec<Vec<Year>>,
    coauthors: Vec<Vec<u32>>,
    edges: HashSet<(u32, u32)>,
    papers_of: Vec<Vec<u32>>,
}

impl State {
    fn pubs_before(&self, a: u32, year: Year) -> f64 {
        self.pub_years[a as usize].partition_point(|&y| y < year) as f64
    }

    fn link(&mut self, a: u32, b: u32) {
        let key = (a.min(b), a.max(b));
        if a != b && self.edges.insert(key) {
            self.coauthors[a as usize].push(b);
            self.coauthors[b as usize].push(a);
        }
    }

    fn distances(&self, sources: &[u32]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.coauthors.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
        while let Some(a) = queue.pop_front() {
            let d = dist[a as usize];
            if d >= DEFAULT_HOP_CAP {
                continue;
            }
            for &b in &self.coauthors[a as usize] {
                if dist[b as usize] == u32::MAX {
                    dist[b as usize] = d + 1;
                    queue.push_back(b);
                }
            }
        }
        dist
    }
}

fn word(topic: Option<usize>, j: usize) -> String {
    match topic {
        Some(t) => format!("t{t}w{j}"),
        None => format!("cw{j}"),
    }
}

fn text(rng: &mut ChaCha8Rng, topic: usize, n: usize) -> String {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.8) {
                word(Some(topic), rng.gen_range(0..WORDS_PER_TOPIC))
            } else {
                word(None, rng.gen_range(0..COMMON_WORDS))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Papers per year growing by 3% annually, summing to `n`.
fn yearly_counts(n: usize, years: (Year, Year)) -> Vec<usize> {
    let span = (years.1 - years.0 + 1) as usize;
    let w: Vec<f64> = (0..span).map(|i| (0.03 * i as f64).exp()).collect();
    let total: f64 = w.iter().sum();
    let raw: Vec<f64> = w.iter().map(|x| x / total * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..span).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(b.cmp(&a)));
    let missing = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    counts
}

fn multiplier(params: &SynthParams, state: &State, papers: &[Paper], p: usize) -> f64 {
    let s = params.stealing_strength;
    let paper = &papers[p];
    if paper.early.is_empty() || s == 0.0 {
        return 1.0;
    }
    let dist = state.distances(&paper.authors);
    let (mut pc, mut ca) = (0.0, 0.0);
    for &c in &paper.early {
        let c = &papers[c as usize];
        pc += c.authors.iter().map(|&a| state.pubs_before(a, c.year)).fold(0.0, f64::max);
        ca += c
            .authors
            .iter()
            .map(|&a| dist[a as usize].min(DEFAULT_HOP_CAP))
            .min()
            .unwrap_or(DEFAULT_HOP_CAP) as f64;
    }
    let n = paper.early.len() as f64;
    let (pc, ca) = (pc / n, ca / n);
    if pc < PUB_THRESHOLD {
        return 1.0 + s * pc / PUB_THRESHOLD;
    }
    let b = if ca < 1.0 {
        0.5
    } else if ca < 2.0 {
        1.0 + params.bucket2_boost
    } else {
        1.0
    };
    (-s * b * (0.3 + (pc - PUB_THRESHOLD) / PUB_THRESHOLD)).exp()
}

/// Deterministic in `seed`.
pub fn generate_synthetic_corpus(params: &SynthParams, seed: u64) -> Result<SynthCorpus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_auth = params.n_authors;
    let n_infl = ((params.influence_fraction * n_auth as f64).ceil() as usize).clamp(1, n_auth - 1);
    let mut ids: Vec<u32> = (0..n_auth as u32).collect();
    ids.shuffle(&mut rng);
    let (infl, regular) = ids.split_at(n_infl);
    let (infl, regular) = (infl.to_vec(), regular.to_vec());
    let home_topic: Vec<usize> = (0..n_auth).map(|_| rng.gen_range(0..params.n_topics)).collect();
    let fitness = LogNormal::new(0.0, params.fitness_sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut state = State {
        pub_years: vec![Vec::new(); n_auth],
        coauthors: vec![Vec::new(); n_auth],
        edges: HashSet::new(),
        papers_of: vec![Vec::new(); n_auth],
    };
    let mut papers: Vec<Paper> = Vec::with_capacity(params.n_papers);
    let mut records: Vec<PaperRecord> = Vec::with_capacity(params.n_papers);
    let mut contexts = Vec::new();
    let id_of = |i: usize| format!("P{:06}", i + 1);
    let author_id = |a: u32| format!("A{:05}", a + 1);
    let venues_per_topic = params.n_venues.div_ceil(params.n_topics);

    let counts = yearly_counts(params.n_papers, params.years);
    for (offset, &count) in counts.iter().enumerate() {
        let y = params.years.0 + offset as Year;

        // Early windows that closed last year fix their multiplier now.
        for p in 0..papers.len() {
            if papers[p].year + DEFAULT_DELTA == y - 1 {
                papers[p].multiplier = multiplier(params, &state, &papers, p);
            }
        }

        let prior = papers.len();
        let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); params.n_topics];
        for _ in 0..count {
            let idx = papers.len();
            // Team: a lead, then partners drawn from past collaborators.
            let lead = if rng.gen_bool(0.35) {
                infl[rng.gen_range(0..infl.len())]
            } else {
                regular[rng.gen_range(0..regular.len())]
            };
            let size = [1, 2, 2, 3, 3, 3, 4][rng.gen_range(0..7)];
            let mut team = vec![lead];
            let mut tries = 0;
            while team.len() < size && tries < 20 {
                tries += 1;
                let known = &state.coauthors[lead as usize];
                let a = if !known.is_empty() && rng.gen_bool(0.5) {
                    known[rng.gen_range(0..known.len())]
                } else if rng.gen_bool(0.1) {
                    infl[rng.gen_range(0..infl.len())]
                } else {
                    regular[rng.gen_range(0..regular.len())]
                };
                if !team.contains(&a) {
                    team.push(a);
                }
            }
            let topic = home_topic[lead as usize];
            let venue = (topic * venues_per_topic + rng.gen_range(0..venues_per_topic)) % params.n_venues;
            by_topic[topic].push(idx);
            records.push(PaperRecord {
                id: id_of(idx),
                title: text(&mut rng, topic, 6),
                abstract_text: text(&mut rng, topic, 25),
                authors: team.iter().map(|&a| author_id(a)).collect(),
                venue: format!("V{:03}", venue + 1),
                year: y,
                references: Vec::new(),
            });
            papers.push(Paper {
                year: y,
                topic,
                authors: team,
                fitness: fitness.sample(&mut rng),
                multiplier: 1.0,
                cites: 0,
                early: Vec::new(),
            });
        }

        // Each earlier paper draws its citations for the year, then hands
        // them to this year's papers, mostly within its topic.
        let mut refs: Vec<Vec<usize>> = vec![Vec::new(); count];
        if count > 0 {
            for p in 0..prior {
                let q = &papers[p];
                let age = (y - q.year) as f64;
                let rate = params.citation_rate
                    * q.fitness
                    * (-(age - 1.0) / 10.0).exp()
                    * q.multiplier
                    * (1.0 + params.attachment * q.cites as f64);
                let k = Poisson::new(rate).map_or(0, |d| d.sample(&mut rng) as usize);
                for _ in 0..k {
                    let pool = &by_topic[q.topic];
                    let citing = if !pool.is_empty() && rng.gen_bool(0.7) {
                        pool[rng.gen_range(0..pool.len())]
                    } else {
                        prior + rng.gen_range(0..count)
                    };
                    let list = &mut refs[citing - prior];
                    if !list.contains(&p) {
                        list.push(p);
                    }
                }
            }
            // Self and co-author citations of papers still in their window.
            for i in 0..count {
                if !rng.gen_bool(params.social_rate) {
                    continue;
                }
                let team = &papers[prior + i].authors;
                let a = team[rng.gen_range(0..team.len())];
                let source = if rng.gen_bool(0.5) || state.coauthors[a as usize].is_empty() {
                    a
                } else {
                    let n = &state.coauthors[a as usize];
                    n[rng.gen_range(0..n.len())]
                };
                let recent: Vec<u32> = state.papers_of[source as usize]
                    .iter()
                    .rev()
                    .take_while(|&&p| papers[p as usize].year + DEFAULT_DELTA >= y)
                    .copied()
                    .collect();
                if let Some(&p) = recent.get(rng.gen_range(0..recent.len().max(1))) {
                    if !refs[i].contains(&(p as usize)) {
                        refs[i].push(p as usize);
                    }
                }
            }
        }

        for (i, list) in refs.iter_mut().enumerate() {
            list.sort_unstable();
            let citing = prior + i;
            let topic = papers[citing].topic;
            for &c in list.iter() {
                papers[c].cites += 1;
                if y <= papers[c].year + DEFAULT_DELTA {
                    papers[c].early.push(citing as u32);
                }
                if rng.gen_bool(0.8) {
                    let count_x = 1 + rng.gen_bool(0.3) as u32 + rng.gen_bool(0.1) as u32;
                    contexts.push(CitationContextRecord {
                        citing: id_of(citing),
                        cited: id_of(c),
                        context_text: text(&mut rng, topic, 6),
                        count_x,
                        cite_words: count_x * rng.gen_range(8..30),
                    });
                }
            }
            records[citing].references = list.iter().map(|&c| id_of(c)).collect();
        }
        for (i, p) in papers.iter().enumerate().skip(prior) {
            for (k, &a) in p.authors.iter().enumerate() {
                state.pub_years[a as usize].push(y);
                state.papers_of[a as usize].push(i as u32);
                for &b in &p.authors[k + 1..] {
                    state.link(a, b);
                }
            }
        }
    }

    let mut influential: Vec<String> = infl.iter().map(|&a| author_id(a)).collect();
    influential.sort();
    Ok(SynthCorpus {
        papers: records,
        authors: (0..n_auth as u32)
            .map(|a| NamedRecord {
                id: author_id(a),
                name: format!("Author {}", a + 1),
            })
            .collect(),
        venues: (0..params.n_venues)
            .map(|v| NamedRecord {
                id: format!("V{:03}", v + 1),
                name: format!("Venue {}", v + 1),
            })
            .collect(),
        contexts,
        influential,
    })
}
