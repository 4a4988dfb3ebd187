//! Line-delimited JSON ingestion.
//!
//! Syntax errors and duplicate ids abort ingestion. Records that parse but
//! are incomplete or out of range are dropped and tallied in the rejection
//! log under a reason key.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use serde_json::Value;

use super::{CitationContextRecord, Corpus, CorpusData, NamedRecord, PaperRecord, Year};
use crate::error::{Error, Result};

pub const MISSING_FIELD: &str = "missing_field";
pub const MALFORMED: &str = "malformed";
pub const YEAR_OUT_OF_RANGE: &str = "year_out_of_range";
pub const SELF_REFERENCE: &str = "self_reference_dropped";
pub const CONTEXT_UNKNOWN_PAPER: &str = "context_unknown_paper";
pub const CONTEXT_SELF: &str = "context_self_citation";
pub const CONTEXT_INVALID_COUNT: &str = "context_invalid_count";
pub const CONTEXT_DUPLICATE: &str = "context_duplicate";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IngestOptions {
    pub year_min: Year,
    pub year_max: Year,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            year_min: 1859,
            year_max: 2012,
        }
    }
}

/// Paths of the four canonical streams. Only `papers` is required.
#[derive(Clone, Debug, Default)]
pub struct IngestSources {
    pub papers: PathBuf,
    pub authors: Option<PathBuf>,
    pub venues: Option<PathBuf>,
    pub contexts: Option<PathBuf>,
}

type Log = BTreeMap<String, u64>;

fn tally(log: &mut Log, reason: &str) {
    *log.entry(reason.to_string()).or_default() += 1;
}

enum Field<T> {
    Ok(T),
    Missing,
    Malformed,
}

fn string_field(obj: &serde_json::Map<String, Value>, key: &str) -> Field<String> {
    match obj.get(key) {
        None | Some(Value::Null) => Field::Missing,
        Some(Value::String(s)) if s.trim().is_empty() => Field::Missing,
        Some(Value::String(s)) => Field::Ok(s.clone()),
        Some(_) => Field::Malformed,
    }
}

fn int_field(obj: &serde_json::Map<String, Value>, key: &str) -> Field<i64> {
    match obj.get(key) {
        None | Some(Value::Null) => Field::Missing,
        Some(v) => match v.as_i64() {
            Some(i) => Field::Ok(i),
            None => Field::Malformed,
        },
    }
}

fn string_list(obj: &serde_json::Map<String, Value>, key: &str) -> Field<Vec<String>> {
    match obj.get(key) {
        None | Some(Value::Null) => Field::Missing,
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    Value::String(s) if !s.trim().is_empty() => out.push(s.clone()),
                    _ => return Field::Malformed,
                }
            }
            Field::Ok(out)
        }
        Some(_) => Field::Malformed,
    }
}

macro_rules! take {
    ($field:expr, $log:expr) => {
        match $field {
            Field::Ok(v) => v,
            Field::Missing => {
                tally($log, MISSING_FIELD);
                return Ok(None);
            }
            Field::Malformed => {
                tally($log, MALFORMED);
                return Ok(None);
            }
        }
    };
}

fn for_each_line(
    stream: &'static str,
    reader: impl BufRead,
    mut f: impl FnMut(usize, serde_json::Map<String, Value>) -> Result<()>,
) -> Result<()> {
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            stream,
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            stream,
            line: line_no,
            message: e.to_string(),
        })?;
        let Value::Object(obj) = value else {
            return Err(Error::Parse {
                stream,
                line: line_no,
                message: "expected a JSON object".into(),
            });
        };
        f(line_no, obj)?;
    }
    Ok(())
}

fn read_named(
    stream: &'static str,
    reader: impl BufRead,
    log: &mut Log,
) -> Result<Vec<(usize, NamedRecord)>> {
    let mut out = Vec::new();
    for_each_line(stream, reader, |line, obj| {
        let parsed = (|| -> Result<Option<NamedRecord>> {
            let id = take!(string_field(&obj, "id"), log);
            let name = take!(string_field(&obj, "name"), log);
            Ok(Some(NamedRecord { id, name }))
        })()?;
        if let Some(r) = parsed {
            out.push((line, r));
        }
        Ok(())
    })?;
    Ok(out)
}

fn parse_paper(
    obj: &serde_json::Map<String, Value>,
    log: &mut Log,
) -> Result<Option<PaperRecord>> {
    let id = take!(string_field(obj, "id"), log);
    let title = take!(string_field(obj, "title"), log);
    let abstract_text = take!(string_field(obj, "abstract"), log);
    let authors = take!(string_list(obj, "authors"), log);
    let venue = take!(string_field(obj, "venue"), log);
    let year = take!(int_field(obj, "year"), log);
    let references = match string_list(obj, "references") {
        Field::Ok(r) => r,
        Field::Missing => Vec::new(),
        Field::Malformed => {
            tally(log, MALFORMED);
            return Ok(None);
        }
    };
    if authors.is_empty() {
        tally(log, MISSING_FIELD);
        return Ok(None);
    }
    let Ok(year) = Year::try_from(year) else {
        tally(log, YEAR_OUT_OF_RANGE);
        return Ok(None);
    };
    Ok(Some(PaperRecord {
        id,
        title,
        abstract_text,
        authors,
        venue,
        year,
        references,
    }))
}

fn parse_context(
    obj: &serde_json::Map<String, Value>,
    log: &mut Log,
) -> Result<Option<CitationContextRecord>> {
    let citing = take!(string_field(obj, "citing"), log);
    let cited = take!(string_field(obj, "cited"), log);
    let context_text = match obj.get("context") {
        Some(Value::String(s)) => s.clone(),
        None | Some(Value::Null) => String::new(),
        Some(_) => {
            tally(log, MALFORMED);
            return Ok(None);
        }
    };
    let count_x = take!(int_field(obj, "count_x"), log);
    let cite_words = take!(int_field(obj, "cite_words"), log);
    let (Ok(count_x), Ok(cite_words)) = (u32::try_from(count_x), u32::try_from(cite_words)) else {
        tally(log, CONTEXT_INVALID_COUNT);
        return Ok(None);
    };
    Ok(Some(CitationContextRecord {
        citing,
        cited,
        context_text,
        count_x,
        cite_words,
    }))
}

impl Corpus {
    /// Builds a corpus from the four canonical line-delimited streams.
    pub fn ingest(
        papers: impl BufRead,
        authors: Option<impl BufRead>,
        venues: Option<impl BufRead>,
        contexts: Option<impl BufRead>,
        opts: &IngestOptions,
    ) -> Result<Corpus> {
        let mut log = Log::new();

        let author_lines = match authors {
            Some(r) => read_named("authors", r, &mut log)?,
            None => Vec::new(),
        };
        let venue_lines = match venues {
            Some(r) => read_named("venues", r, &mut log)?,
            None => Vec::new(),
        };
        let mut paper_lines = Vec::new();
        for_each_line("papers", papers, |line, obj| {
            let id = obj.get("id").and_then(Value::as_str).map(str::to_string);
            paper_lines.push((line, id, parse_paper(&obj, &mut log)?));
            Ok(())
        })?;
        let mut context_lines = Vec::new();
        if let Some(r) = contexts {
            for_each_line("contexts", r, |line, obj| {
                if let Some(c) = parse_context(&obj, &mut log)? {
                    context_lines.push((line, c));
                }
                Ok(())
            })?;
        }

        check_unique("authors", author_lines.iter().map(|(l, r)| (*l, r.id.as_str())))?;
        check_unique("venues", venue_lines.iter().map(|(l, r)| (*l, r.id.as_str())))?;
        check_unique(
            "papers",
            paper_lines
                .iter()
                .filter_map(|(l, id, _)| id.as_deref().map(|id| (*l, id))),
        )?;

        assemble(
            paper_lines.into_iter().filter_map(|(_, _, p)| p).collect(),
            author_lines.into_iter().map(|(_, r)| r).collect(),
            venue_lines.into_iter().map(|(_, r)| r).collect(),
            context_lines.into_iter().map(|(_, c)| c).collect(),
            opts,
            log,
        )
    }

    /// Opens and ingests the files named in `sources`.
    pub fn ingest_files(sources: &IngestSources, opts: &IngestOptions) -> Result<Corpus> {
        let open = |p: &PathBuf| -> Result<BufReader<File>> {
            File::open(p)
                .map(BufReader::new)
                .map_err(|e| Error::io(p, e))
        };
        let papers = open(&sources.papers)?;
        let authors = sources.authors.as_ref().map(open).transpose()?;
        let venues = sources.venues.as_ref().map(open).transpose()?;
        let contexts = sources.contexts.as_ref().map(open).transpose()?;
        Corpus::ingest(papers, authors, venues, contexts, opts)
    }

    /// Corpus from papers alone, with default options.
    pub fn from_papers(papers: Vec<PaperRecord>) -> Result<Corpus> {
        Corpus::from_records(papers, vec![], vec![], vec![], &IngestOptions::default())
    }

    /// Builds a corpus from in-memory records, applying the same validation
    /// as [`Corpus::ingest`].
    pub fn from_records(
        papers: Vec<PaperRecord>,
        authors: Vec<NamedRecord>,
        venues: Vec<NamedRecord>,
        contexts: Vec<CitationContextRecord>,
        opts: &IngestOptions,
    ) -> Result<Corpus> {
        check_unique("authors", authors.iter().enumerate().map(|(i, r)| (i + 1, r.id.as_str())))?;
        check_unique("venues", venues.iter().enumerate().map(|(i, r)| (i + 1, r.id.as_str())))?;
        check_unique("papers", papers.iter().enumerate().map(|(i, r)| (i + 1, r.id.as_str())))?;
        let mut log = Log::new();
        let papers = papers
            .into_iter()
            .filter(|p| {
                let complete = ![&p.id, &p.title, &p.abstract_text, &p.venue]
                    .iter()
                    .any(|s| s.trim().is_empty())
                    && !p.authors.is_empty()
                    && p.authors.iter().all(|a| !a.trim().is_empty());
                if !complete {
                    tally(&mut log, MISSING_FIELD);
                }
                complete
            })
            .collect();
        assemble(papers, authors, venues, contexts, opts, log)
    }
}

fn check_unique<'a>(
    stream: &'static str,
    ids: impl Iterator<Item = (usize, &'a str)>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (line, id) in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId {
                stream,
                id: id.to_string(),
                line,
            });
        }
    }
    Ok(())
}

fn assemble(
    papers: Vec<PaperRecord>,
    mut authors: Vec<NamedRecord>,
    mut venues: Vec<NamedRecord>,
    contexts: Vec<CitationContextRecord>,
    opts: &IngestOptions,
    mut log: Log,
) -> Result<Corpus> {
    let mut kept = Vec::with_capacity(papers.len());
    for mut p in papers {
        if p.year < opts.year_min || p.year > opts.year_max {
            tally(&mut log, YEAR_OUT_OF_RANGE);
            continue;
        }
        let before = p.references.len();
        p.references.retain(|r| r != &p.id);
        if p.references.len() != before {
            tally(&mut log, SELF_REFERENCE);
        }
        let mut seen = HashSet::new();
        p.references.retain(|r| seen.insert(r.clone()));
        let mut seen = HashSet::new();
        p.authors.retain(|a| seen.insert(a.clone()));
        kept.push(p);
    }

    // Authors and venues referenced by papers but absent from their streams
    // are registered with an empty name.
    let mut known: HashSet<String> = authors.iter().map(|a| a.id.clone()).collect();
    for p in &kept {
        for a in &p.authors {
            if known.insert(a.clone()) {
                authors.push(NamedRecord {
                    id: a.clone(),
                    name: String::new(),
                });
            }
        }
    }
    let mut known: HashSet<String> = venues.iter().map(|v| v.id.clone()).collect();
    for p in &kept {
        if known.insert(p.venue.clone()) {
            venues.push(NamedRecord {
                id: p.venue.clone(),
                name: String::new(),
            });
        }
    }

    let paper_ids: HashMap<&str, ()> = kept.iter().map(|p| (p.id.as_str(), ())).collect();
    let mut pairs = HashSet::new();
    let mut kept_contexts = Vec::with_capacity(contexts.len());
    for c in contexts {
        if !paper_ids.contains_key(c.citing.as_str()) || !paper_ids.contains_key(c.cited.as_str())
        {
            tally(&mut log, CONTEXT_UNKNOWN_PAPER);
        } else if c.citing == c.cited {
            tally(&mut log, CONTEXT_SELF);
        } else if c.count_x == 0 {
            tally(&mut log, CONTEXT_INVALID_COUNT);
        } else if !pairs.insert((c.citing.clone(), c.cited.clone())) {
            tally(&mut log, CONTEXT_DUPLICATE);
        } else {
            kept_contexts.push(c);
        }
    }

    let retained = vec![true; kept.len()];
    Ok(Corpus::from_data(CorpusData {
        papers: kept,
        authors,
        venues,
        contexts: kept_contexts,
        retained,
        rejection_log: log,
    }))
}
