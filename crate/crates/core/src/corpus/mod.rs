//! Normalized bibliographic corpus.
//!
//! A [`Corpus`] stores every accepted paper, author, venue and citation
//! context, plus a *retained* mask marking the candidate papers. Filtering
//! only narrows the mask: papers that drop out keep their records so they
//! still count as citers and still contribute to author histories.
//!
//! All counts are intra-corpus. References to unknown papers are kept on the
//! [`PaperRecord`] as metadata but never resolved into edges.

mod ingest;
mod snapshot;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{IngestOptions, IngestSources};

pub type Year = i32;

macro_rules! index_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_type!(
    /// Dense index of a paper inside one [`Corpus`].
    PaperIdx
);
index_type!(
    /// Dense index of an author inside one [`Corpus`].
    AuthorIdx
);
index_type!(
    /// Dense index of a venue inside one [`Corpus`].
    VenueIdx
);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub authors: Vec<String>,
    pub venue: String,
    pub year: Year,
    pub references: Vec<String>,
}

impl PaperRecord {
    /// Record with placeholder title and abstract, handy for fixtures.
    pub fn new(id: &str, year: Year, venue: &str, authors: &[&str], references: &[&str]) -> Self {
        PaperRecord {
            id: id.into(),
            title: format!("title {id}"),
            abstract_text: format!("abstract {id}"),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            venue: venue.into(),
            year,
            references: references.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRecord {
    pub id: String,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationContextRecord {
    pub citing: String,
    pub cited: String,
    #[serde(rename = "context")]
    pub context_text: String,
    pub count_x: u32,
    pub cite_words: u32,
}

/// A resolved incoming citation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Citation {
    pub year: Year,
    pub citing: PaperIdx,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_papers: u64,
    pub n_authors: u64,
    pub year_min: Year,
    pub year_max: Year,
    pub n_contexts: u64,
}

/// Persisted part of a corpus. Everything else is rebuilt on load.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub(crate) struct CorpusData {
    pub papers: Vec<PaperRecord>,
    pub authors: Vec<NamedRecord>,
    pub venues: Vec<NamedRecord>,
    pub contexts: Vec<CitationContextRecord>,
    pub retained: Vec<bool>,
    pub rejection_log: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Default)]
struct CorpusIndex {
    paper_by_id: HashMap<String, PaperIdx>,
    author_by_id: HashMap<String, AuthorIdx>,
    venue_by_id: HashMap<String, VenueIdx>,
    paper_authors: Vec<Vec<AuthorIdx>>,
    paper_venue: Vec<VenueIdx>,
    references: Vec<Vec<PaperIdx>>,
    dangling: Vec<u32>,
    in_citations: Vec<Vec<Citation>>,
    author_papers: Vec<Vec<PaperIdx>>,
    /// Years of every citation received by any paper of the author, sorted.
    author_citation_years: Vec<Vec<Year>>,
    venue_papers: Vec<Vec<PaperIdx>>,
    context_by_pair: HashMap<(PaperIdx, PaperIdx), usize>,
    horizon: Option<Year>,
}

/// Immutable store of papers, authors, venues, citation edges and contexts.
#[derive(Clone, Debug)]
pub struct Corpus {
    data: CorpusData,
    index: CorpusIndex,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl Corpus {
    pub fn empty() -> Self {
        Self::from_data(CorpusData::default())
    }

    pub(crate) fn from_data(data: CorpusData) -> Self {
        let index = CorpusIndex::build(&data);
        Corpus { data, index }
    }

    // ---- filtering -------------------------------------------------------

    /// Keeps the currently retained papers that received at least one
    /// citation within `[T, T + delta]`.
    pub fn filter(&self, delta: i32) -> Result<Corpus> {
        if delta < 0 {
            return Err(Error::InvalidArgument(format!(
                "delta must be nonnegative, got {delta}"
            )));
        }
        let mut data = self.data.clone();
        for (i, keep) in data.retained.iter_mut().enumerate() {
            if !*keep {
                continue;
            }
            let p = PaperIdx(i as u32);
            let t = self.year(p);
            *keep = self.citations_in_window_at(p, t, t + delta) >= 1;
        }
        Ok(Corpus {
            data,
            index: self.index.clone(),
        })
    }

    /// Drops every paper published after `year` together with the contexts it
    /// authored. The retained mask of surviving papers is preserved.
    pub fn truncate(&self, year: Year) -> Corpus {
        let mut data = CorpusData {
            authors: self.data.authors.clone(),
            venues: self.data.venues.clone(),
            rejection_log: self.data.rejection_log.clone(),
            ..Default::default()
        };
        for (i, paper) in self.data.papers.iter().enumerate() {
            if paper.year <= year {
                data.papers.push(paper.clone());
                data.retained.push(self.data.retained[i]);
            }
        }
        for ctx in &self.data.contexts {
            let citing = self.index.paper_by_id[&ctx.citing];
            if self.year(citing) <= year {
                data.contexts.push(ctx.clone());
            }
        }
        Corpus::from_data(data)
    }

    // ---- counts ----------------------------------------------------------

    /// Number of stored citing papers with year in `[y_start, y_end]`.
    pub fn citations_in_window(&self, id: &str, y_start: Year, y_end: Year) -> Result<usize> {
        if y_start > y_end {
            return Err(Error::InvalidArgument(format!(
                "empty window [{y_start}, {y_end}]"
            )));
        }
        let p = self.paper_idx(id)?;
        Ok(self.citations_in_window_at(p, y_start, y_end))
    }

    pub fn citations_in_window_at(&self, p: PaperIdx, y_start: Year, y_end: Year) -> usize {
        let cites = &self.index.in_citations[p.index()];
        let lo = cites.partition_point(|c| c.year < y_start);
        let hi = cites.partition_point(|c| c.year <= y_end);
        hi.saturating_sub(lo)
    }

    /// Citations of `p` arriving in years `<= year`.
    pub fn citations_up_to(&self, p: PaperIdx, year: Year) -> usize {
        self.index.in_citations[p.index()].partition_point(|c| c.year <= year)
    }

    /// Counts over the retained papers: their authors, year range, and the
    /// contexts pointing at them.
    pub fn stats(&self) -> CorpusStats {
        let mut stats = CorpusStats::default();
        let mut seen_author = vec![false; self.data.authors.len()];
        let mut years: Option<(Year, Year)> = None;
        for p in self.retained_papers() {
            stats.n_papers += 1;
            let y = self.year(p);
            years = Some(match years {
                None => (y, y),
                Some((lo, hi)) => (lo.min(y), hi.max(y)),
            });
            for a in self.authors_of(p) {
                if !seen_author[a.index()] {
                    seen_author[a.index()] = true;
                    stats.n_authors += 1;
                }
            }
        }
        if let Some((lo, hi)) = years {
            stats.year_min = lo;
            stats.year_max = hi;
        }
        stats.n_contexts = self
            .data
            .contexts
            .iter()
            .filter(|c| self.data.retained[self.index.paper_by_id[&c.cited].index()])
            .count() as u64;
        stats
    }

    pub fn rejection_log(&self) -> &BTreeMap<String, u64> {
        &self.data.rejection_log
    }

    /// Number of stored references that do not resolve to a stored paper.
    pub fn dangling_references(&self) -> u64 {
        self.index.dangling.iter().map(|&d| d as u64).sum()
    }

    /// Number of resolved citation edges.
    pub fn resolved_references(&self) -> u64 {
        self.index.references.iter().map(|r| r.len() as u64).sum()
    }

    // ---- lookups ---------------------------------------------------------

    pub fn paper_idx(&self, id: &str) -> Result<PaperIdx> {
        self.index
            .paper_by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::not_found("paper", id))
    }

    pub fn author_idx(&self, id: &str) -> Result<AuthorIdx> {
        self.index
            .author_by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::not_found("author", id))
    }

    pub fn venue_idx(&self, id: &str) -> Result<VenueIdx> {
        self.index
            .venue_by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::not_found("venue", id))
    }

    pub fn n_papers_stored(&self) -> usize {
        self.data.papers.len()
    }

    pub fn n_authors_stored(&self) -> usize {
        self.data.authors.len()
    }

    pub fn n_venues_stored(&self) -> usize {
        self.data.venues.len()
    }

    pub fn papers(&self) -> impl Iterator<Item = PaperIdx> + '_ {
        (0..self.data.papers.len() as u32).map(PaperIdx)
    }

    pub fn retained_papers(&self) -> impl Iterator<Item = PaperIdx> + '_ {
        self.data
            .retained
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| PaperIdx(i as u32))
    }

    pub fn is_retained(&self, p: PaperIdx) -> bool {
        self.data.retained[p.index()]
    }

    pub fn paper(&self, p: PaperIdx) -> &PaperRecord {
        &self.data.papers[p.index()]
    }

    pub fn paper_id(&self, p: PaperIdx) -> &str {
        &self.data.papers[p.index()].id
    }

    pub fn year(&self, p: PaperIdx) -> Year {
        self.data.papers[p.index()].year
    }

    pub fn authors_of(&self, p: PaperIdx) -> &[AuthorIdx] {
        &self.index.paper_authors[p.index()]
    }

    pub fn venue_of(&self, p: PaperIdx) -> VenueIdx {
        self.index.paper_venue[p.index()]
    }

    /// Resolved references of `p`.
    pub fn references_of(&self, p: PaperIdx) -> &[PaperIdx] {
        &self.index.references[p.index()]
    }

    /// Incoming citations of `p`, sorted by (year, citing index).
    pub fn citations_of(&self, p: PaperIdx) -> &[Citation] {
        &self.index.in_citations[p.index()]
    }

    pub fn author(&self, a: AuthorIdx) -> &NamedRecord {
        &self.data.authors[a.index()]
    }

    pub fn author_id(&self, a: AuthorIdx) -> &str {
        &self.data.authors[a.index()].id
    }

    pub fn venue(&self, v: VenueIdx) -> &NamedRecord {
        &self.data.venues[v.index()]
    }

    /// Papers of an author sorted by (year, index).
    pub fn papers_of_author(&self, a: AuthorIdx) -> &[PaperIdx] {
        &self.index.author_papers[a.index()]
    }

    /// Papers published in a venue, sorted by (year, index).
    pub fn papers_of_venue(&self, v: VenueIdx) -> &[PaperIdx] {
        &self.index.venue_papers[v.index()]
    }

    /// Sorted years of every citation received by the author's papers.
    pub fn author_citation_years(&self, a: AuthorIdx) -> &[Year] {
        &self.index.author_citation_years[a.index()]
    }

    pub fn context(&self, citing: PaperIdx, cited: PaperIdx) -> Option<&CitationContextRecord> {
        self.index
            .context_by_pair
            .get(&(citing, cited))
            .map(|&i| &self.data.contexts[i])
    }

    pub fn contexts(&self) -> &[CitationContextRecord] {
        &self.data.contexts
    }

    /// Latest publication year among stored papers.
    pub fn horizon(&self) -> Option<Year> {
        self.index.horizon
    }

    /// Earliest publication year among stored papers.
    pub fn first_year(&self) -> Option<Year> {
        self.data.papers.iter().map(|p| p.year).min()
    }
}

impl CorpusIndex {
    fn build(data: &CorpusData) -> Self {
        let mut idx = CorpusIndex::default();
        for (i, p) in data.papers.iter().enumerate() {
            idx.paper_by_id.insert(p.id.clone(), PaperIdx(i as u32));
        }
        for (i, a) in data.authors.iter().enumerate() {
            idx.author_by_id.insert(a.id.clone(), AuthorIdx(i as u32));
        }
        for (i, v) in data.venues.iter().enumerate() {
            idx.venue_by_id.insert(v.id.clone(), VenueIdx(i as u32));
        }

        let n = data.papers.len();
        idx.in_citations = vec![Vec::new(); n];
        idx.author_papers = vec![Vec::new(); data.authors.len()];
        idx.venue_papers = vec![Vec::new(); data.venues.len()];
        for (i, p) in data.papers.iter().enumerate() {
            let pi = PaperIdx(i as u32);
            let authors: Vec<AuthorIdx> = p.authors.iter().map(|a| idx.author_by_id[a]).collect();
            for &a in &authors {
                idx.author_papers[a.index()].push(pi);
            }
            idx.paper_authors.push(authors);
            let v = idx.venue_by_id[&p.venue];
            idx.venue_papers[v.index()].push(pi);
            idx.paper_venue.push(v);

            let mut resolved = Vec::with_capacity(p.references.len());
            let mut dangling = 0u32;
            for r in &p.references {
                match idx.paper_by_id.get(r) {
                    Some(&q) => {
                        resolved.push(q);
                        idx.in_citations[q.index()].push(Citation {
                            year: p.year,
                            citing: pi,
                        });
                    }
                    None => dangling += 1,
                }
            }
            idx.references.push(resolved);
            idx.dangling.push(dangling);
            idx.horizon = Some(idx.horizon.map_or(p.year, |h: Year| h.max(p.year)));
        }
        for cites in &mut idx.in_citations {
            cites.sort_unstable();
        }
        let year_of = |p: &PaperIdx| data.papers[p.index()].year;
        for papers in idx.author_papers.iter_mut().chain(idx.venue_papers.iter_mut()) {
            papers.sort_by_key(|p| (year_of(p), *p));
            papers.dedup();
        }
        idx.author_citation_years = idx
            .author_papers
            .iter()
            .map(|papers| {
                let mut years: Vec<Year> = papers
                    .iter()
                    .flat_map(|p| idx.in_citations[p.index()].iter().map(|c| c.year))
                    .collect();
                years.sort_unstable();
                years
            })
            .collect();
        for (i, c) in data.contexts.iter().enumerate() {
            let key = (idx.paper_by_id[&c.citing], idx.paper_by_id[&c.cited]);
            idx.context_by_pair.entry(key).or_insert(i);
        }
        idx
    }
}
