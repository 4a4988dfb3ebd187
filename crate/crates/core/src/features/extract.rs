use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, FeatureMeta, FeatureSlot, FeatureVector, N_SLOTS};
use crate::corpus::{AuthorIdx, Corpus, PaperIdx, Year};
use crate::earlyciters::{self, CoAuthorCache, EcOptions};
use crate::error::{Error, Result};
use crate::graphs::{self, pagerank, PageRankOptions};
use crate::text::{self, entropy};
use crate::topics::TopicModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub ec: EcOptions,
    /// Window for the ECC slot; `None` uses `ec.delta`.
    pub ecc_delta: Option<i32>,
    /// Reference year minus publication year; `None` uses `ec.delta`.
    pub reference_offset: Option<i32>,
    pub pagerank: PageRankOptions,
    /// Additive smoothing for the novelty divergence.
    pub smoothing: f64,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            ec: EcOptions::default(),
            ecc_delta: None,
            reference_offset: None,
            pagerank: PageRankOptions::default(),
            smoothing: 1e-9,
        }
    }
}

impl FeatureOptions {
    pub fn with_delta(delta: i32) -> Self {
        FeatureOptions {
            ec: EcOptions::with_delta(delta),
            ..Default::default()
        }
    }
}

/// Largest `h` such that `h` of the counts are at least `h`.
pub fn h_index(counts: &[u64]) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|(i, &c)| c > *i as u64).count() as u64
}

/// Dense ranks scaled to (0, 1]: the largest value maps to 1 and the
/// smallest of `m` distinct values to `1/m`.
pub fn rank_normalize(values: &[f64]) -> Vec<f64> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    let m = distinct.len() as f64;
    values
        .iter()
        .map(|v| {
            let rank = distinct.partition_point(|d| d.total_cmp(v).is_gt()) as f64 + 1.0;
            (m - rank + 1.0) / m
        })
        .collect()
}

/// Age of a paper at the reference year.
pub fn recency(year: Year, reference_year: Year) -> Result<f64> {
    if reference_year < year {
        return Err(Error::InvalidArgument(format!(
            "reference year {reference_year} precedes publication year {year}"
        )));
    }
    Ok((reference_year - year) as f64)
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
        .0
}

/// Everything that depends only on the state of the corpus up to a year.
struct YearState {
    acs: Vec<f64>,
    acar: Vec<f64>,
    paper_rank: Vec<f64>,
    venue_rank: Vec<f64>,
    vcvr: Vec<f64>,
    topic_rank: Vec<f64>,
    median_novelty: f64,
}

/// Computes feature vectors, caching per-year graph state.
///
/// At-publication slots of a paper published in `T` read only papers and
/// citations dated `<= T`; author histories use years strictly before `T`.
/// Early-window slots read up to `T + δ`.
pub struct FeatureExtractor<'a> {
    corpus: &'a Corpus,
    topics: &'a TopicModel,
    opts: FeatureOptions,
    topic_cache: Vec<Option<Vec<f64>>>,
    novelty_cache: Vec<Option<Option<f64>>>,
    years: BTreeMap<Year, YearState>,
    coauthors: CoAuthorCache,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(corpus: &'a Corpus, topics: &'a TopicModel, opts: FeatureOptions) -> Self {
        let n = corpus.n_papers_stored();
        FeatureExtractor {
            corpus,
            topics,
            opts,
            topic_cache: vec![None; n],
            novelty_cache: vec![None; n],
            years: BTreeMap::new(),
            coauthors: CoAuthorCache::default(),
        }
    }

    pub fn options(&self) -> &FeatureOptions {
        &self.opts
    }

    fn topic(&mut self, p: PaperIdx) -> &[f64] {
        let (corpus, topics) = (self.corpus, self.topics);
        self.topic_cache[p.index()].get_or_insert_with(|| topics.paper_topics(corpus, p))
    }

    /// Divergence of a paper's words from its references published no later
    /// than itself; `None` without such references.
    fn novelty(&mut self, p: PaperIdx) -> Option<f64> {
        if let Some(v) = self.novelty_cache[p.index()] {
            return v;
        }
        let c = self.corpus;
        let t = c.year(p);
        let refs: Vec<PaperIdx> = c.references_of(p).iter().copied().filter(|&q| c.year(q) <= t).collect();
        let v = if refs.is_empty() {
            None
        } else {
            let own = text::tokenize(&crate::topics::paper_text(c, p));
            let pooled: Vec<String> = refs
                .iter()
                .flat_map(|&q| text::tokenize(&crate::topics::paper_text(c, q)))
                .collect();
            Some(text::smoothed_kl(&text::counts(&own), &text::counts(&pooled), self.opts.smoothing))
        };
        self.novelty_cache[p.index()] = Some(v);
        v
    }

    fn year_state(&mut self, t: Year) -> Result<&YearState> {
        if !self.years.contains_key(&t) {
            let state = self.build_year(t)?;
            self.years.insert(t, state);
        }
        Ok(&self.years[&t])
    }

    fn build_year(&mut self, t: Year) -> Result<YearState> {
        let c = self.corpus;
        let pr = self.opts.pagerank;

        let co = self.coauthors.get(c, t);
        let scores = pagerank(co, &pr)?;
        let mut acs = vec![0.0; c.n_authors_stored()];
        for (node, s) in scores.scores.iter().enumerate() {
            acs[co.author(node).index()] = *s;
        }

        let cg = graphs::citation_graph_at(c, t);
        let scores = pagerank(&cg, &pr)?;
        let mut paper_rank = vec![0.0; c.n_papers_stored()];
        for (node, s) in scores.scores.iter().enumerate() {
            paper_rank[cg.key(node) as usize] = *s;
        }

        let vg = graphs::venue_graph_at(c, t);
        let scores = pagerank(&vg, &pr)?;
        let mut venue_rank = vec![0.0; c.n_venues_stored()];
        let mut vcvr = vec![0.0; c.n_venues_stored()];
        let in_deg: Vec<f64> = (0..vg.len()).map(|n| vg.in_degree_cross(vg.key(n))).collect();
        for (node, r) in rank_normalize(&in_deg).into_iter().enumerate() {
            venue_rank[vg.key(node) as usize] = scores.scores[node];
            vcvr[vg.key(node) as usize] = r;
        }

        // Authors active by year t, ranked by citations received before t.
        let active: Vec<AuthorIdx> = (0..c.n_authors_stored() as u32)
            .map(AuthorIdx)
            .filter(|&a| c.papers_of_author(a).first().is_some_and(|&p| c.year(p) <= t))
            .collect();
        let cits: Vec<f64> = active
            .iter()
            .map(|&a| earlyciters::author_snapshot(c, a, t).cit_count as f64)
            .collect();
        let mut acar = vec![0.0; c.n_authors_stored()];
        for (a, r) in active.iter().zip(rank_normalize(&cits)) {
            acar[a.index()] = r;
        }

        let k = self.topics.k();
        let (mut sum, mut n) = (vec![0.0; k], vec![0usize; k]);
        let mut novelties = Vec::new();
        let visible: Vec<PaperIdx> = c.papers().filter(|&q| c.year(q) <= t).collect();
        for &q in &visible {
            let top = argmax(self.topic(q));
            sum[top] += c.citations_up_to(q, t) as f64;
            n[top] += 1;
            if let Some(v) = self.novelty(q) {
                novelties.push(v);
            }
        }
        let means: Vec<f64> = sum.iter().zip(&n).map(|(s, &n)| if n > 0 { s / n as f64 } else { 0.0 }).collect();
        novelties.sort_by(f64::total_cmp);
        let median_novelty = match novelties.len() {
            0 => 0.0,
            m if m % 2 == 1 => novelties[m / 2],
            m => (novelties[m / 2 - 1] + novelties[m / 2]) / 2.0,
        };

        Ok(YearState {
            acs,
            acar,
            paper_rank,
            venue_rank,
            vcvr,
            topic_rank: rank_normalize(&means),
            median_novelty,
        })
    }

    pub fn extract_id(&mut self, id: &str) -> Result<FeatureVector> {
        let p = self.corpus.paper_idx(id)?;
        self.extract(p)
    }

    pub fn extract(&mut self, p: PaperIdx) -> Result<FeatureVector> {
        let mut v = self.extract_at_publication(p)?;
        let c = self.corpus;
        let delta = self.opts.ec.delta;
        let mut set = |s: FeatureSlot, x: f64| v.values[s.index()] = x;

        let ec_opts = self.opts.ec;
        let g = self.coauthors.get(c, c.year(p) + delta);
        let agg = earlyciters::ec_aggregates(c, g, p, &ec_opts)?;
        set(FeatureSlot::Ecpc, agg.pc);
        set(FeatureSlot::Eccc, agg.cc);
        set(FeatureSlot::Ecca, agg.ca);
        set(FeatureSlot::Ecc, earlyciters::ecc(c, p, self.opts.ecc_delta.unwrap_or(delta))? as f64);
        let (mut count_x, mut words) = (0.0, 0.0);
        for r in &agg.citing {
            match c.context(r.citing, p) {
                Some(ctx) => {
                    count_x += ctx.count_x as f64;
                    words += ctx.cite_words as f64;
                }
                None => count_x += 1.0,
            }
        }
        let n = agg.citing.len() as f64;
        set(FeatureSlot::Ccac, count_x / n);
        set(FeatureSlot::Ccaw, words / n);
        Ok(v)
    }

    /// Only the slots available at publication; early-window slots are 0.
    pub fn extract_at_publication(&mut self, p: PaperIdx) -> Result<FeatureVector> {
        let c = self.corpus;
        let t = c.year(p);
        let delta = self.opts.ec.delta;
        let reference_year = t + self.opts.reference_offset.unwrap_or(delta);
        let mut v = [0.0; N_SLOTS];
        let mut set = |s: FeatureSlot, x: f64| v[s.index()] = x;

        // Paper content.
        let theta = self.topic(p).to_vec();
        let novelty = self.novelty(p);
        let state = self.year_state(t)?;
        let (median, topic_rank) = (state.median_novelty, state.topic_rank[argmax(&theta)]);
        set(FeatureSlot::Pcn, novelty.unwrap_or(median));
        set(FeatureSlot::Pctr, topic_rank);
        set(FeatureSlot::Pcd, entropy(&theta));

        // Authors, aggregated by maximum.
        let mut best = [0.0f64; 8];
        for &a in c.authors_of(p) {
            let row = self.author_row(a, t)?;
            for (b, x) in best.iter_mut().zip(row) {
                *b = b.max(x);
            }
        }
        for (slot, x) in [
            FeatureSlot::Achi,
            FeatureSlot::Acar,
            FeatureSlot::AcpiMax,
            FeatureSlot::AcpiTotal,
            FeatureSlot::Acp,
            FeatureSlot::Acs,
            FeatureSlot::Aca,
            FeatureSlot::Acv,
        ]
        .into_iter()
        .zip(best)
        {
            set(slot, x);
        }

        // Venue.
        let venue = c.venue_of(p);
        let state = self.year_state(t)?;
        set(FeatureSlot::Vcvr, state.vcvr[venue.index()]);
        set(FeatureSlot::Vcvc, state.venue_rank[venue.index()]);
        let papers = c.papers_of_venue(venue);
        let before = &papers[..papers.partition_point(|&q| c.year(q) < t)];
        let counts: Vec<f64> = before.iter().map(|&q| c.citations_up_to(q, t) as f64).collect();
        set(FeatureSlot::VcpiMax, counts.iter().copied().fold(0.0, f64::max));
        set(FeatureSlot::VcpiTotal, counts.iter().sum());

        set(FeatureSlot::Pr, recency(t, reference_year)?);

        Ok(FeatureVector {
            values: v,
            meta: FeatureMeta {
                paper_id: c.paper_id(p).to_string(),
                year: t,
                delta,
                reference_year,
            },
        })
    }

    /// ACHI, ACAR, ACPI_max, ACPI_total, ACP, ACS, ACA, ACV of one author.
    fn author_row(&mut self, a: AuthorIdx, t: Year) -> Result<[f64; 8]> {
        let c = self.corpus;
        let papers = c.papers_of_author(a);
        let before: Vec<PaperIdx> = papers[..papers.partition_point(|&q| c.year(q) < t)].to_vec();
        let cites: Vec<u64> = before
            .iter()
            .map(|&q| c.citations_in_window_at(q, Year::MIN, t - 1) as u64)
            .collect();
        let k = self.topics.k();
        let mut mean_topic = vec![0.0; k];
        for &q in &before {
            for (m, x) in mean_topic.iter_mut().zip(self.topic(q)) {
                *m += x;
            }
        }
        let acv = if before.is_empty() {
            0.0
        } else {
            mean_topic.iter_mut().for_each(|m| *m /= before.len() as f64);
            entropy(&mean_topic)
        };
        let state = self.year_state(t)?;
        let aca: f64 = before.iter().map(|q| state.paper_rank[q.index()]).sum();
        Ok([
            h_index(&cites) as f64,
            state.acar[a.index()],
            cites.iter().copied().max().unwrap_or(0) as f64,
            cites.iter().sum::<u64>() as f64,
            before.len() as f64,
            state.acs[a.index()],
            aca,
            acv,
        ])
    }

    /// Vectors for `papers`, skipping those without early citations.
    pub fn extract_many(&mut self, papers: impl IntoIterator<Item = PaperIdx>) -> Result<FeatureMatrix> {
        let mut rows = Vec::new();
        for p in papers {
            match self.extract(p) {
                Ok(v) => rows.push(v),
                Err(Error::EmptyWindow { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(FeatureMatrix { rows })
    }

    /// Vectors for every retained paper.
    pub fn extract_all(&mut self) -> Result<FeatureMatrix> {
        let papers: Vec<PaperIdx> = self.corpus.retained_papers().collect();
        self.extract_many(papers)
    }
}
